#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "riesz/io.hpp"

namespace riesz {

struct RunContext {
  std::optional<std::uint64_t> seed;  // overrides the config seed when set
  unsigned workers = 1;
  std::filesystem::path out = "riesz_out";
  bool json = false;
  std::string command_line;
};

struct RunResult {
  int exit_code = 0;
  Json summary;
  Artifacts artifacts;
};

/// Runs a validated experiment config, writes its artifacts and always
/// writes manifest.json (recording the error on failure).
RunResult run_experiment(const Json& config, const RunContext& ctx, std::ostream& out);

/// Command-line entry point. Exit codes: 0 success, 1 run or criterion
/// failure, 2 usage or config error.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace riesz
