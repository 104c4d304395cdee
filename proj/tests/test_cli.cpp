#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "riesz/error.hpp"
#include "riesz/run.hpp"

using namespace riesz;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "riesz_forge");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("riesz_forge_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("riesz_forge_test_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("doubles are written with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  for (double v : {1.0 / 3, std::numbers::pi, 1e-300, -123456.789})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config validation reports the offending line") {
  const std::string missing_seed = "{\n  \"experiment\": \"generate\",\n  \"s\": 2,\n  \"set\": {\"kind\": \"circle\"},\n  \"N\": [4]\n}\n";
  try {
    parse_run_config(missing_seed, "cfg.json");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
  const std::string bad_radius =
      "{\n  \"experiment\": \"generate\",\n  \"seed\": 1,\n  \"s\": 2,\n  \"set\": {\n    \"kind\": \"circle\",\n    \"radius\": -1\n  },\n  \"N\": [4]\n}\n";
  try {
    parse_run_config(bad_radius, "cfg.json");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("cfg.json:7:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_run_config("{\"experiment\": \"sweep\", \"seed\": 1, \"s\": 2, \"set\": {\"kind\": \"circle\"}, \"N\": [8, 4]}", "x"), Error);
  CHECK_THROWS_AS(parse_run_config("{ not json", "x"), Error);
  const Json ok = parse_run_config(
      "{\"experiment\": \"sweep\", \"seed\": 1, \"s\": 2, \"set\": {\"kind\": \"circle\"}, \"N\": [4, 8, 16, 32]}", "x");
  CHECK(ok["N"].size() == 4);
}

TEST_CASE("schema file matches the embedded schema") {
  const Json embedded = Json::parse(config_schema());
  CHECK(embedded["required"] == Json({"experiment", "seed", "s"}));
}

TEST_CASE("invalid config exits 2 and writes nothing") {
  const fs::path out = scratch("invalid");
  const fs::path cfg = write_config("invalid", "{\"experiment\": \"generate\", \"s\": 2, \"set\": {\"kind\": \"circle\"}, \"N\": [4]}");
  const Outcome o = run({"generate", "--config", cfg.string(), "--out", out.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("seed") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("generate four points on a circle") {
  const fs::path out = scratch("square");
  const Outcome o = run({"generate", "--set", "circle", "--N", "4", "--s", "2", "--out", out.string()});
  REQUIRE(o.code == 0);
  const auto rows = read_csv(out / "points.csv");
  REQUIRE(rows.size() == 4);
  std::vector<Point> pts;
  for (const auto& r : rows) pts.push_back(Point{r[0], r[1]});
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::hypot(pts[i][0], pts[i][1]) == doctest::Approx(1.0).epsilon(1e-12));
    double nearest = INFINITY;
    for (std::size_t j = 0; j < 4; ++j)
      if (j != i) nearest = std::min(nearest, distance(pts[i], pts[j]));
    CHECK(nearest == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
  const Json m = Json::parse(slurp(out / "manifest.json"));
  CHECK(m["status"] == "ok");
  CHECK(m["seed"] == 1);
  CHECK(m["config"]["N"] == Json({4}));
  CHECK(m["versions"].contains("boost"));
}

TEST_CASE("constants as JSON") {
  const fs::path out = scratch("constants");
  const Outcome o = run({"constants", "--s", "2", "--d", "1", "--json", "--out", out.string()});
  REQUIRE(o.code == 0);
  const Json j = Json::parse(o.out);
  CHECK(j["constant"]["status"] == "exact");
  CHECK(j["constant"]["value"].get<double>() == doctest::Approx(std::numbers::pi * std::numbers::pi / 3).epsilon(1e-15));
  const Outcome table = run({"constants", "--s", "4", "--d", "3", "--out", out.string()});
  CHECK(table.code == 0);
  CHECK(table.out.find("unknown") != std::string::npos);
  CHECK(run({"constants", "--s", "2", "--d", "3", "--out", out.string()}).code == 2);
}

TEST_CASE("unknown recipe exits 2") {
  const Outcome o = run({"recipe", "unknown-name", "--out", scratch("recipe").string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("sink-scaling") != std::string::npos);
}

TEST_CASE("a recipe reports its criterion") {
  const fs::path out = scratch("sink");
  const Outcome o = run({"recipe", "sink-scaling", "--out", out.string()});
  CHECK(o.code == 0);
  CHECK(o.out.rfind("PASS criterion 7 sink-scaling", 0) == 0);
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("identical reruns give byte-identical CSV artifacts") {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  const fs::path cfg = write_config("rerun",
                                    "{\"experiment\": \"sweep\", \"seed\": 9, \"s\": 3, \"set\": {\"kind\": \"sphere2\"},"
                                    " \"N\": [12, 16, 20, 24], \"optimizer\": {\"starts\": 2, \"max_iters\": 300}}");
  REQUIRE(run({"sweep", "--config", cfg.string(), "--out", a.string(), "--workers", "2"}).code == 0);
  REQUIRE(run({"sweep", "--config", cfg.string(), "--out", b.string(), "--workers", "2"}).code == 0);
  for (const char* f : {"points.csv", "energies.csv", "fit.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("environment variable overrides --out") {
  const fs::path env_dir = scratch("env"), flag_dir = scratch("flag");
  ::setenv("RIESZ_FORGE_OUT", env_dir.c_str(), 1);
  const Outcome o = run({"generate", "--set", "interval", "--N", "5", "--s", "2", "--out", flag_dir.string()});
  ::unsetenv("RIESZ_FORGE_OUT");
  CHECK(o.code == 0);
  CHECK(fs::exists(env_dir / "manifest.json"));
  CHECK_FALSE(fs::exists(flag_dir));
}

TEST_CASE("a failing run still writes the manifest") {
  // A zero of order t >= s makes the weighted measure diverge.
  const fs::path out = scratch("failure");
  const fs::path cfg = write_config(
      "failure",
      "{\"experiment\": \"distribution\", \"seed\": 1, \"s\": 2, \"set\": {\"kind\": \"circle\"}, \"N\": [24],"
      " \"weight\": {\"kind\": \"power_zero\", \"a\": [1, 0], \"t\": 3}, \"optimizer\": {\"starts\": 1, \"max_iters\": 50}}");
  const Outcome o = run({"distribution", "--config", cfg.string(), "--out", out.string()});
  CHECK(o.code == 1);
  REQUIRE(fs::exists(out / "manifest.json"));
  const Json m = Json::parse(slurp(out / "manifest.json"));
  CHECK(m["status"] == "failed");
  CHECK(m["partial"] == true);
  CHECK(m["error"]["kind"] == "divergence");
}
