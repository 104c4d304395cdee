#include "riesz/run.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <rapidjson/rapidjson.h>

#include "riesz/asymptotics.hpp"
#include "riesz/diagnostics.hpp"
#include "riesz/error.hpp"
#include "riesz/optimize.hpp"
#include "riesz/recipes.hpp"

#ifndef RIESZ_FORGE_VERSION
#define RIESZ_FORGE_VERSION "0.0.0"
#endif

namespace riesz {

namespace fs = std::filesystem;

namespace {

Json library_versions() {
  Json j;
  j["riesz_forge"] = RIESZ_FORGE_VERSION;
  j["boost"] = BOOST_LIB_VERSION;
  j["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["rapidjson"] = RAPIDJSON_VERSION_STRING;
  j["cli11"] = CLI11_VERSION;
  j["compiler"] = __VERSION__;
  return j;
}

Json manifest(const std::string& command, const Json& config, std::uint64_t seed, const RunContext& ctx) {
  Json m;
  m["tool"] = "riesz_forge";
  m["command"] = command;
  m["command_line"] = ctx.command_line;
  m["seed"] = seed;
  m["workers"] = ctx.workers;
  m["config"] = config;
  m["versions"] = library_versions();
  return m;
}

// Writes whatever artifacts exist plus the manifest; the manifest is written
// even when the artifacts cannot be.
void finish(const fs::path& dir, Json m, const Artifacts& a, const Error* error) {
  std::vector<std::string> files;
  std::string write_error;
  try {
    files = write_artifacts(dir, a);
  } catch (const std::exception& e) {
    write_error = e.what();
  }
  m["status"] = error || !write_error.empty() ? "failed" : "ok";
  m["artifacts"] = files;
  m["partial"] = error != nullptr || !write_error.empty();
  if (error)
    m["error"] = {{"kind", to_string(error->kind())}, {"message", error->what()}};
  else if (!write_error.empty())
    m["error"] = {{"kind", "io"}, {"message", write_error}};
  else
    m["error"] = nullptr;
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_json(dir / "manifest.json", m);
}

OptimizeOptions optimizer_options(const Json& cfg, std::uint64_t seed, unsigned workers) {
  OptimizeOptions o;
  o.seed = seed;
  o.workers = workers;
  if (cfg.contains("optimizer")) {
    const Json& j = cfg["optimizer"];
    if (j.contains("max_iters")) o.max_iters = j["max_iters"];
    if (j.contains("grad_tol")) o.grad_tol = j["grad_tol"];
    if (j.contains("starts")) o.starts = j["starts"];
    if (j.contains("exchange_rounds")) o.exchange_rounds = j["exchange_rounds"];
    if (j.contains("exchange_candidates")) o.exchange_candidates = j["exchange_candidates"];
    if (j.contains("weighted_init")) o.weighted_init = j["weighted_init"];
  }
  return o;
}

EnergyRow row_of(const OptimizeResult& r, double s, int d) {
  EnergyRow row;
  row.n = static_cast<long long>(r.config.size());
  row.energy = r.report.total;
  row.normalized = s >= d ? r.report.total / tau_eval(s, d, row.n) : std::nan("");
  row.iterations = r.iterations;
  row.converged = r.converged;
  row.start = r.start_index;
  return row;
}

std::vector<std::size_t> bins_of(const Json& cfg, const EmbeddedSet& set) {
  if (cfg.contains("partition")) return cfg["partition"]["bins"].get<std::vector<std::size_t>>();
  return {set.hausdorff_dim() == 1 ? std::size_t{20} : std::size_t{8}};
}

// Regions whose closure holds the point a (the zero of a weight).
std::vector<std::size_t> regions_at(const RegionPartition& part, const Point& a) {
  if (!part.set().contains(a, 1e-12 * part.set().diameter())) return {};
  const std::size_t home = part.locate(a);
  std::vector<std::size_t> out{home};
  const Region& r = part[home];
  if (r.param_dim != 1) return out;
  const EmbeddedSet& set = part.set();
  const Chart& ch = set.chart(r.component);
  const double u = set.to_param(r.component, a)[0];
  const double tol = 1e-12 * (ch.hi[0] - ch.lo[0]);
  for (std::size_t i = 0; i < part.size(); ++i) {
    const Region& q = part[i];
    if (i == home || q.component != r.component) continue;
    const bool touches = std::fabs(q.hi[0] - u) <= tol || std::fabs(q.lo[0] - u) <= tol ||
                         (ch.periodic[0] && std::fabs(u - ch.lo[0]) <= tol && std::fabs(q.hi[0] - ch.hi[0]) <= tol);
    if (touches) out.push_back(i);
  }
  return out;
}

class Experiment {
 public:
  Experiment(const Json& cfg, std::uint64_t seed, unsigned workers, Artifacts& a, Json& summary)
      : cfg_(cfg), seed_(seed), workers_(workers), a_(a), summary_(summary) {
    s_ = cfg["s"];
    if (cfg.contains("set")) {
      set_ = std::make_shared<const EmbeddedSet>(parse_set(cfg["set"]));
      d_ = cfg.contains("d") ? cfg["d"].get<int>() : static_cast<int>(set_->hausdorff_dim());
      w_ = cfg.contains("weight") ? parse_weight(cfg["weight"], *set_, s_, d_) : unit_weight();
      ns_ = cfg["N"].get<std::vector<int>>();
    } else {
      d_ = cfg["d"];
    }
  }

  void run(const std::string& kind) {
    if (kind == "generate") return generate();
    if (kind == "sweep") return sweep();
    if (kind == "distribution") return distribution();
    if (kind == "separation") return separation_exp();
    if (kind == "constants") return constants();
    if (kind == "splitcheck") return splitcheck();
    if (kind == "zeroweight") return zeroweight();
    throw Error(ErrorKind::InvalidArgument, "unknown experiment '" + kind + "'");
  }

 private:
  OptimizeOptions options() const { return optimizer_options(cfg_, seed_, workers_); }

  void record(const std::vector<OptimizeResult>& rs) {
    Json rows = Json::array();
    for (const OptimizeResult& r : rs) {
      a_.energies.push_back(row_of(r, s_, d_));
      rows.push_back({{"N", r.config.size()},
                      {"energy", r.report.total},
                      {"iterations", r.iterations},
                      {"converged", r.converged}});
    }
    summary_["energies"] = rows;
    a_.points = rs.back().config;
  }

  void generate() {
    std::vector<OptimizeResult> rs;
    for (int n : ns_) rs.push_back(minimize(set_, n, s_, w_, options()));
    record(rs);
  }

  void sweep() {
    const auto rs = minimize_sequence(set_, ns_, s_, w_, options());
    record(rs);
    if (rs.size() >= 4 && s_ >= d_) {
      std::vector<std::pair<long long, double>> pairs;
      for (const auto& r : rs) pairs.emplace_back(static_cast<long long>(r.config.size()), r.report.total);
      const double h = weighted_hausdorff_total(*set_, w_, s_, d_);
      const ScalingFit fit = fit_g(pairs, s_, d_, h);
      Json j = to_json(fit);
      j["weighted_measure"] = h;
      const KnownConstant kc = s_ > d_ ? known_constant(s_, d_) : KnownConstant{};
      if (s_ == d_ || kc.value) {
        const double g = theoretical_g_from_measure(h, s_, d_, kc.value);
        j["g_theory"] = g;
        j["relative_error"] = fit.g_hat / g - 1.0;
      }
      a_.fit = j;
      summary_["fit"] = j;
    }
  }

  void distribution() {
    const OptimizeResult r = minimize(set_, ns_.back(), s_, w_, options());
    record({r});
    const RegionPartition part = RegionPartition::grid(*set_, bins_of(cfg_, *set_));
    const DistributionTest t = distribution_test(r.config, w_, s_, d_, part);
    a_.distribution = t;
    summary_["distribution"] = to_json(t);
  }

  void separation_exp() {
    const auto rs = minimize_sequence(set_, ns_, s_, w_, options());
    record(rs);
    const double alpha = cfg_.contains("alpha") ? cfg_["alpha"].get<double>() : static_cast<double>(d_);
    const SeparationSeries series = separation_series(rs, s_, alpha);
    a_.separation = series;
    summary_["separation"] = to_json(series);
  }

  void constants() {
    const KnownConstant kc = known_constant(s_, d_);
    Json j;
    j["s"] = s_;
    j["d"] = d_;
    j["status"] = to_string(kc.status);
    j["value"] = kc.value ? Json(*kc.value) : Json(nullptr);
    j["bound"] = kc.status == ConstantStatus::ConjecturedUpperBound ? Json(*kc.value) : Json(nullptr);
    j["formula"] = kc.formula;
    summary_["constant"] = j;
    a_.summary = summary_;
  }

  void splitcheck() {
    OptimizeOptions o = options();
    if (!(cfg_.contains("optimizer") && cfg_["optimizer"].contains("exchange_rounds"))) o.exchange_rounds = 60;
    const OptimizeResult r = minimize(set_, ns_.back(), s_, w_, o);
    record({r});
    const std::size_t k = set_->component_count();
    const WeightedMeasure m = weighted_hausdorff(*set_, w_, s_, d_, RegionPartition::whole(*set_));
    // The constant C cancels in the predicted shares.
    std::vector<double> g(k);
    for (std::size_t i = 0; i < k; ++i) g[i] = theoretical_g_from_measure(m.region_values[i], s_, d_, 1.0);
    std::vector<double> predicted(k);
    if (k == 2) {
      predicted[0] = split_fraction(g[0], g[1], s_, d_);
      predicted[1] = split_fraction(g[1], g[0], s_, d_);
    } else {
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) total += std::pow(g[i], -d_ / s_);
      for (std::size_t i = 0; i < k; ++i) predicted[i] = std::pow(g[i], -d_ / s_) / total;
    }
    std::vector<std::size_t> counts(k, 0);
    for (const Point& p : r.config.points()) ++counts[set_->component_of(p)];
    Json comps = Json::array();
    const double n = static_cast<double>(r.config.size());
    for (std::size_t i = 0; i < k; ++i)
      comps.push_back({{"component", i},
                       {"points", counts[i]},
                       {"observed", static_cast<double>(counts[i]) / n},
                       {"predicted", predicted[i]}});
    summary_["components"] = comps;
    summary_["exchanges"] = r.exchanges;
    a_.summary = summary_;
  }

  void zeroweight() {
    const OptimizeResult r = minimize(set_, ns_.back(), s_, w_, options());
    record({r});
    const RegionPartition part = RegionPartition::grid(*set_, bins_of(cfg_, *set_));
    const DistributionTest t = distribution_test(r.config, w_, s_, d_, part);
    a_.distribution = t;
    const Point a = w_.metadata().zeros.at(0).location;
    const auto near = regions_at(part, a);
    double inner = 0.0, emp = 0.0, tgt = 0.0;
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (std::find(near.begin(), near.end(), i) != near.end()) {
        emp += t.empirical[i];
        tgt += t.target[i];
      } else {
        inner = std::max(inner, std::fabs(t.empirical[i] - t.target[i]));
      }
    }
    Json j = to_json(t);
    j["regions_at_zero"] = near;
    j["sup_error_away_from_zero"] = inner;
    j["mass_at_zero"] = {{"empirical", emp}, {"target", tgt}};
    const std::vector<double> gammas =
        cfg_.contains("gammas") ? cfg_["gammas"].get<std::vector<double>>() : std::vector<double>{0.5, 0.25};
    Json scaling = Json::array();
    if (norm(a) == 0.0) {
      const double e = energy(r.config, s_, w_, workers_).total;
      const double t_order = w_.metadata().zeros[0].order;
      for (double gamma : gammas) {
        const double eg = scaled_energy(r.config, gamma, s_, w_);
        scaling.push_back({{"gamma", gamma}, {"ratio", eg / e}, {"predicted", std::pow(gamma, t_order - s_)}});
      }
      j["scaling"] = scaling;
    } else {
      j["scaling"] = "skipped: the zero is not at the origin";
    }
    summary_["zeroweight"] = j;
    a_.summary = summary_;
  }

  const Json& cfg_;
  std::uint64_t seed_;
  unsigned workers_;
  Artifacts& a_;
  Json& summary_;
  double s_ = 0.0;
  int d_ = 1;
  std::shared_ptr<const EmbeddedSet> set_;
  WeightFn w_ = unit_weight();
  std::vector<int> ns_;
};

void print_summary(const std::string& kind, const Json& summary, std::ostream& out) {
  if (summary.contains("constant")) {
    const Json& c = summary["constant"];
    out << std::left << std::setw(8) << "s" << std::setw(4) << "d" << std::setw(13) << "status"
        << std::setw(26) << "value" << "bound\n";
    auto show = [](const Json& v) { return v.is_null() ? std::string("-") : format_double(v.get<double>()); };
    out << std::setw(8) << format_double(c["s"]) << std::setw(4) << c["d"].get<int>() << std::setw(13)
        << c["status"].get<std::string>() << std::setw(26) << show(c["value"]) << show(c["bound"]) << '\n';
    return;
  }
  out << kind << ":\n";
  if (summary.contains("energies"))
    for (const Json& r : summary["energies"])
      out << "  N=" << r["N"] << "  E=" << format_double(r["energy"]) << "  iterations=" << r["iterations"]
          << (r["converged"].get<bool>() ? "" : " (iteration cap or stall)") << '\n';
  if (summary.contains("fit")) {
    const Json& f = summary["fit"];
    out << "  g_hat=" << f["g_hat"].dump() << "  p=" << f["p"].dump() << "  C_hat=" << f["c_hat"].dump();
    if (f.contains("g_theory")) out << "  g_theory=" << f["g_theory"].dump();
    out << '\n';
  }
  if (summary.contains("distribution"))
    out << "  sup_error=" << summary["distribution"]["sup_error"].dump()
        << "  l1_error=" << summary["distribution"]["l1_error"].dump() << '\n';
  if (summary.contains("separation"))
    out << "  running min of normalized separation=" << summary["separation"]["running_min"].dump() << '\n';
  if (summary.contains("components"))
    for (const Json& c : summary["components"])
      out << "  component " << c["component"] << ": " << c["points"] << " points, share "
          << format_double(c["observed"]) << " (predicted " << format_double(c["predicted"]) << ")\n";
  if (summary.contains("zeroweight")) {
    const Json& z = summary["zeroweight"];
    out << "  sup_error away from zero=" << z["sup_error_away_from_zero"].dump() << "  mass at zero "
        << z["mass_at_zero"]["empirical"].dump() << " vs " << z["mass_at_zero"]["target"].dump() << '\n';
    if (z["scaling"].is_array())
      for (const Json& r : z["scaling"])
        out << "  E(gamma x)/E(x) at gamma=" << r["gamma"].dump() << ": " << format_double(r["ratio"])
            << " (gamma^(t-s) = " << format_double(r["predicted"]) << ")\n";
  }
}

}  // namespace

RunResult run_experiment(const Json& config, const RunContext& ctx, std::ostream& out) {
  RunResult res;
  const std::string kind = config["experiment"];
  const std::uint64_t seed = ctx.seed ? *ctx.seed : config["seed"].get<std::uint64_t>();
  const unsigned workers = ctx.workers;
  res.summary = Json::object();
  res.summary["experiment"] = kind;
  res.summary["seed"] = seed;
  const Json m = manifest(kind, config, seed, ctx);
  try {
    Experiment(config, seed, workers, res.artifacts, res.summary).run(kind);
  } catch (const Error& e) {
    finish(ctx.out, m, res.artifacts, &e);
    res.exit_code = 1;
    res.summary["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    return res;
  } catch (const std::exception& e) {
    const Error wrapped(ErrorKind::InvalidArgument, e.what());
    finish(ctx.out, m, res.artifacts, &wrapped);
    res.exit_code = 1;
    res.summary["error"] = {{"kind", "internal"}, {"message", e.what()}};
    return res;
  }
  finish(ctx.out, m, res.artifacts, nullptr);
  if (ctx.json)
    out << res.summary.dump(2) << '\n';
  else
    print_summary(kind, res.summary, out);
  return res;
}

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  bool json = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Run config (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Random seed (overrides the config seed)");
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory");
  sub->add_flag("--json", c.json, "Print machine-readable JSON");
}

struct FlagConfig {
  std::string set = "circle";
  std::vector<int> n;
  double s = 2.0;
  std::optional<int> d;
  std::optional<double> alpha;
  std::vector<std::size_t> bins;
  std::optional<int> starts;
  std::optional<int> max_iters;
  std::string weight = "unit";
  std::string density = "cosine";
  double amplitude = 0.5;
  std::vector<double> zero;
  double t = 1.0;
};

void add_flag_config(CLI::App* sub, FlagConfig& f, bool with_set) {
  if (with_set) {
    sub->add_option("--set", f.set, "Set kind (unit size)")
        ->check(CLI::IsMember({"circle", "interval", "sphere2", "flat_torus", "cube2"}));
    sub->add_option("--N", f.n, "Point counts")->delimiter(',');
    sub->add_option("--alpha", f.alpha, "Separation exponent");
    sub->add_option("--bins", f.bins, "Partition bins per axis")->delimiter(',');
    sub->add_option("--starts", f.starts, "Optimizer starts");
    sub->add_option("--max-iters", f.max_iters, "Optimizer iteration cap");
    sub->add_option("--weight", f.weight, "Weight kind")->check(CLI::IsMember({"unit", "density", "power_zero"}));
    sub->add_option("--density", f.density, "Named density")->check(CLI::IsMember({"uniform", "cosine", "zonal"}));
    sub->add_option("--amplitude", f.amplitude, "Density amplitude");
    sub->add_option("--zero", f.zero, "Zero location of a power_zero weight")->delimiter(',');
    sub->add_option("--t", f.t, "Zero order of a power_zero weight");
  }
  sub->add_option("--s", f.s, "Riesz exponent s");
  sub->add_option("--d", f.d, "Dimension d");
}

Json flags_to_config(const std::string& kind, const FlagConfig& f, std::uint64_t seed) {
  Json cfg;
  cfg["experiment"] = kind;
  cfg["seed"] = seed;
  cfg["s"] = f.s;
  if (f.d) cfg["d"] = *f.d;
  if (kind == "constants") {
    if (!f.d) cfg["d"] = 1;
    return cfg;
  }
  if (kind == "splitcheck") {
    cfg["set"] = {{"kind", "disjoint_union"},
                  {"parts",
                   {{{"set", {{"kind", "circle"}, {"radius", 1.0}}}, {"offset", {0.0, 0.0}}},
                    {{"set", {{"kind", "circle"}, {"radius", 2.0}}}, {"offset", {5.0, 0.0}}}}}};
  } else if (f.set == "cube2") {
    cfg["set"] = {{"kind", "cube"}, {"dim", 2}};
  } else {
    cfg["set"] = {{"kind", f.set}};
  }
  std::vector<int> n = f.n;
  if (n.empty()) n = kind == "sweep" || kind == "separation" ? std::vector<int>{32, 64, 128, 256}
                                                              : std::vector<int>{kind == "generate" ? 64 : 300};
  cfg["N"] = n;
  if (f.alpha) cfg["alpha"] = *f.alpha;
  if (!f.bins.empty()) cfg["partition"] = {{"bins", f.bins}};
  if (f.starts || f.max_iters) {
    cfg["optimizer"] = Json::object();
    if (f.starts) cfg["optimizer"]["starts"] = *f.starts;
    if (f.max_iters) cfg["optimizer"]["max_iters"] = *f.max_iters;
  }
  std::string weight = f.weight;
  if (kind == "zeroweight") weight = "power_zero";
  if (weight == "density") {
    cfg["weight"] = {{"kind", "density"}, {"density", f.density}, {"amplitude", f.amplitude}};
  } else if (weight == "power_zero") {
    std::vector<double> a = f.zero;
    if (a.empty()) a = {1.0, 0.0};
    cfg["weight"] = {{"kind", "power_zero"}, {"a", a}, {"t", f.t}};
  }
  return cfg;
}

fs::path output_dir(const Common& c, const Json* cfg) {
  if (const char* env = std::getenv("RIESZ_FORGE_OUT"); env && *env) return env;
  if (!c.out.empty()) return c.out;
  if (cfg && cfg->contains("output")) return (*cfg)["output"].get<std::string>();
  return "riesz_out";
}

int run_recipes(const std::string& name, const Common& c, const std::string& line, std::ostream& out,
                std::ostream& err) {
  std::vector<std::string> names;
  if (name == "all") {
    for (const RecipeInfo& r : recipe_catalog()) names.push_back(r.name);
  } else {
    bool known = false;
    for (const RecipeInfo& r : recipe_catalog()) known = known || r.name == name;
    if (!known) {
      err << "error: unknown recipe '" << name << "'; known recipes:";
      for (const RecipeInfo& r : recipe_catalog()) err << ' ' << r.name;
      err << '\n';
      return 2;
    }
    names.push_back(name);
  }
  RecipeOptions ro;
  ro.seed = c.seed.value_or(1);
  ro.workers = c.workers;
  RunContext ctx;
  ctx.workers = c.workers;
  ctx.command_line = line;
  const fs::path base = output_dir(c, nullptr);
  int status = 0;
  Json all = Json::array();
  for (const std::string& n : names) {
    const RecipeReport rep = run_recipe(n, ro);
    const fs::path dir = names.size() == 1 ? base : base / n;
    Json m = manifest("recipe " + n, Json{{"recipe", n}}, ro.seed, ctx);
    m["result"] = rep.to_json();
    finish(dir, m, rep.artifacts, nullptr);
    if (c.json)
      all.push_back(rep.to_json());
    else
      out << format_report(rep) << std::flush;
    if (!rep.passed() && rep.fatal) status = 1;
  }
  if (c.json) out << (all.size() == 1 ? all[0] : all).dump(2) << '\n';
  return status;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"riesz_forge: weighted Riesz energy minimizers and their asymptotics"};
  app.set_version_flag("--version", std::string(RIESZ_FORGE_VERSION));
  app.require_subcommand(1);

  const std::vector<std::string> kinds{"generate", "sweep", "distribution", "separation",
                                       "constants", "splitcheck", "zeroweight"};
  Common common;
  FlagConfig flags;
  std::map<std::string, CLI::App*> subs;
  for (const std::string& k : kinds) {
    CLI::App* sub = app.add_subcommand(k, "Run the '" + k + "' experiment");
    add_common(sub, common);
    add_flag_config(sub, flags, k != "constants");
    subs[k] = sub;
  }
  std::string recipe_name;
  CLI::App* recipe = app.add_subcommand("recipe", "Run a named acceptance experiment ('all' runs every one)");
  recipe->add_option("name", recipe_name, "Recipe name")->required();
  add_common(recipe, common);

  std::string line;
  for (int i = 0; i < argc; ++i) line += (i ? " " : "") + std::string(argv[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << RIESZ_FORGE_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  if (recipe->parsed()) return run_recipes(recipe_name, common, line, out, err);

  std::string kind;
  for (const auto& [k, sub] : subs)
    if (sub->parsed()) kind = k;

  Json cfg;
  try {
    if (!common.config.empty()) {
      cfg = load_run_config(common.config);
      if (cfg["experiment"] != kind)
        throw Error(ErrorKind::Schema, common.config + ": config experiment '" +
                                           cfg["experiment"].get<std::string>() + "' does not match subcommand '" +
                                           kind + "'");
    } else {
      cfg = parse_run_config(flags_to_config(kind, flags, common.seed.value_or(1)).dump(2), "<flags>");
    }
    // Build the set and weight once up front so semantic config errors
    // exit before anything is written.
    if (cfg.contains("set")) {
      const EmbeddedSet set = parse_set(cfg["set"]);
      if (cfg.contains("weight")) {
        const int d = cfg.contains("d") ? cfg["d"].get<int>() : static_cast<int>(set.hausdorff_dim());
        (void)parse_weight(cfg["weight"], set, cfg["s"], d);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  RunContext ctx;
  ctx.seed = common.seed;
  ctx.workers = common.workers;
  ctx.out = output_dir(common, &cfg);
  ctx.json = common.json;
  ctx.command_line = line;
  const RunResult res = run_experiment(cfg, ctx, out);
  if (res.exit_code != 0)
    err << "error: " << res.summary["error"]["kind"].get<std::string>() << ": "
        << res.summary["error"]["message"].get<std::string>() << '\n';
  return res.exit_code;
}

}  // namespace riesz
