#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "riesz/io.hpp"

namespace riesz {

/// One measured-vs-expected comparison inside a recipe.
struct Check {
  std::string label;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct RecipeReport {
  std::string name;
  int criterion = 0;
  /// Soft recipes report failures without failing the run.
  bool fatal = true;
  std::vector<Check> checks;
  double seconds = 0.0;
  Artifacts artifacts;

  bool passed() const;
  Json to_json() const;
};

struct RecipeInfo {
  std::string name;
  int criterion = 0;
  std::string summary;
};

struct RecipeOptions {
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// The acceptance experiments, in criterion order.
const std::vector<RecipeInfo>& recipe_catalog();

/// Runs a named recipe; unknown names throw ErrorKind::InvalidArgument.
RecipeReport run_recipe(std::string_view name, const RecipeOptions& opts);

/// "PASS criterion 3 circle-s1-transition: ..." followed by one indented line per check.
std::string format_report(const RecipeReport& report);

}  // namespace riesz
