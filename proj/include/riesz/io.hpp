#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "riesz/asymptotics.hpp"
#include "riesz/diagnostics.hpp"
#include "riesz/energy.hpp"
#include "riesz/geometry.hpp"
#include "riesz/weights.hpp"

namespace riesz {

using Json = nlohmann::ordered_json;

/// printf %.17g: 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

struct EnergyRow {
  long long n = 0;
  double energy = 0.0;
  double normalized = 0.0;  // E / tau_{s,d}(N)
  int iterations = 0;
  bool converged = false;
  int start = 0;
};

/// Everything a run or recipe may emit; absent members produce no file.
struct Artifacts {
  std::optional<Configuration> points;
  std::vector<EnergyRow> energies;
  std::optional<Json> fit;
  std::optional<DistributionTest> distribution;
  std::optional<SeparationSeries> separation;
  std::optional<Json> summary;  // written as summary.json
};

void write_points_csv(const std::filesystem::path& file, const Configuration& config);
void write_energies_csv(const std::filesystem::path& file, const std::vector<EnergyRow>& rows);
void write_distribution_csv(const std::filesystem::path& file, const DistributionTest& test);
void write_separation_csv(const std::filesystem::path& file, const SeparationSeries& series);
void write_json(const std::filesystem::path& file, const Json& value);

/// Writes the present artifacts into `dir` and returns the file names written.
std::vector<std::string> write_artifacts(const std::filesystem::path& dir, const Artifacts& a);

Json to_json(const ScalingFit& fit);
Json to_json(const DistributionTest& test);
Json to_json(const SeparationSeries& series);

/// The run-config JSON schema (the contents of docs/schema.json).
std::string_view config_schema();

/// Parses and validates a run config. Errors are ErrorKind::Schema with a
/// "<source>:<line>: <message>" text.
Json parse_run_config(std::string_view text, std::string_view source);
Json load_run_config(const std::filesystem::path& file);

/// Builds catalog objects from validated config fragments.
EmbeddedSet parse_set(const Json& node);
WeightFn parse_weight(const Json& node, const EmbeddedSet& set, double s, int d);

}  // namespace riesz
