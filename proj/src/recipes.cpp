#include "riesz/recipes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>

#include "riesz/asymptotics.hpp"
#include "riesz/diagnostics.hpp"
#include "riesz/error.hpp"
#include "riesz/optimize.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace {

constexpr double kPi = std::numbers::pi;

Check relative(std::string label, double measured, double expected, double tol) {
  Check c;
  c.label = std::move(label);
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tol;
  c.passed = std::isfinite(measured) && std::fabs(measured / expected - 1.0) <= tol;
  c.note = "relative";
  return c;
}

Check absolute(std::string label, double measured, double expected, double tol) {
  Check c;
  c.label = std::move(label);
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tol;
  c.passed = std::isfinite(measured) && std::fabs(measured - expected) <= tol;
  c.note = "absolute";
  return c;
}

Check at_least(std::string label, double measured, double floor) {
  Check c;
  c.label = std::move(label);
  c.measured = measured;
  c.expected = floor;
  c.passed = measured >= floor;
  c.note = "lower bound";
  return c;
}

Check failed(std::string label, const std::string& why) {
  Check c;
  c.label = std::move(label);
  c.passed = false;
  c.measured = std::nan("");
  c.note = why;
  return c;
}

OptimizeOptions base_options(const RecipeOptions& ro, int starts) {
  OptimizeOptions o;
  o.seed = ro.seed;
  o.workers = ro.workers;
  o.starts = starts;
  return o;
}

struct Sweep {
  std::vector<OptimizeResult> results;
  std::vector<std::pair<long long, double>> pairs;
  std::vector<EnergyRow> rows;
};

Sweep run_sweep(const std::shared_ptr<const EmbeddedSet>& set, const std::vector<int>& ns, double s,
                int d, const WeightFn& w, const OptimizeOptions& o) {
  Sweep sw;
  sw.results = minimize_sequence(set, ns, s, w, o);
  for (const OptimizeResult& r : sw.results) {
    const auto n = static_cast<long long>(r.config.size());
    sw.pairs.emplace_back(n, r.report.total);
    EnergyRow row;
    row.n = n;
    row.energy = r.report.total;
    row.normalized = r.report.total / tau_eval(s, d, n);
    row.iterations = r.iterations;
    row.converged = r.converged;
    row.start = r.start_index;
    sw.rows.push_back(row);
  }
  return sw;
}

std::shared_ptr<const EmbeddedSet> share(EmbeddedSet set) {
  return std::make_shared<const EmbeddedSet>(std::move(set));
}

Json fit_json(const ScalingFit& fit, double g_expected) {
  Json j = to_json(fit);
  j["g_expected"] = g_expected;
  j["relative_error"] = fit.g_hat / g_expected - 1.0;
  return j;
}

// --- criterion 1 ---------------------------------------------------------
void circle_s2(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::circle(1.0));
  const std::vector<int> ns{32, 64, 128, 256, 512};
  const Sweep sw = run_sweep(set, ns, 2.0, 1, unit_weight(), base_options(ro, 2));
  const double g_exact = known_constant(2.0, 1).value.value() / std::pow(2.0 * kPi, 2.0);
  const ScalingFit fit = fit_g(sw.pairs, 2.0, 1, set->measure());
  rep.checks.push_back(relative("g_hat vs 2*zeta(2)/(2*pi)^2", fit.g_hat, g_exact, 0.01));
  for (const auto& [n, e] : sw.pairs) {
    const double nn = static_cast<double>(n);
    rep.checks.push_back(
        relative("E(" + std::to_string(n) + ") vs N(N^2-1)/12", e, nn * (nn * nn - 1.0) / 12.0, 1e-3));
  }
  rep.artifacts.energies = sw.rows;
  rep.artifacts.fit = fit_json(fit, g_exact);
  rep.artifacts.points = sw.results.back().config;
}

// --- criterion 2 ---------------------------------------------------------
void interval_s3(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::interval(1.0));
  const std::vector<int> ns{32, 64, 128, 256, 512};
  const Sweep sw = run_sweep(set, ns, 3.0, 1, unit_weight(), base_options(ro, 2));
  const double g_exact = 2.0 * riemann_zeta(3.0);
  const ScalingFit fit = fit_g(sw.pairs, 3.0, 1, set->measure());
  rep.checks.push_back(relative("g_hat vs 2*zeta(3)", fit.g_hat, g_exact, 0.02));
  rep.artifacts.energies = sw.rows;
  rep.artifacts.fit = fit_json(fit, g_exact);
  rep.artifacts.points = sw.results.back().config;
}

// --- criterion 3 ---------------------------------------------------------
void circle_s1(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::circle(1.0));
  std::vector<std::pair<long long, double>> pairs;
  PairOptions po;
  po.distance_floor = 1e-14;
  po.workers = ro.workers;
  for (int k = 7; k <= 12; ++k) {
    const long long n = 1LL << k;
    std::vector<Point> pts;
    for (long long i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
      pts.push_back(Point{std::cos(t), std::sin(t)});
    }
    const double e = try_energy_total(pts, 1.0, unit_weight(), po).value();
    pairs.emplace_back(n, e);
    EnergyRow row;
    row.n = n;
    row.energy = e;
    row.normalized = e / tau_eval(1.0, 1, n);
    row.converged = true;
    rep.artifacts.energies.push_back(row);
  }
  const double g_exact = beta(1) / set->measure();
  const ScalingFit fit = fit_g(pairs, 1.0, 1, set->measure());
  rep.checks.push_back(relative("g_hat vs beta_1/(2*pi)", fit.g_hat, g_exact, 0.05));
  rep.artifacts.fit = fit_json(fit, g_exact);
}

// --- criterion 4 ---------------------------------------------------------
void density_circle(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::circle(1.0));
  const double s = 2.0;
  const WeightFn w = density_weight(named_density("cosine", *set, 0.5), s, 1, *set);
  const OptimizeResult r = minimize(set, 500, s, w, base_options(ro, 2));
  const RegionPartition part = RegionPartition::grid(*set, {20});
  const DistributionTest t = distribution_test(r.config, w, s, 1, part);
  rep.checks.push_back(absolute("sup bin error vs rho", t.sup_error, 0.0, 0.03));
  rep.artifacts.distribution = t;
  rep.artifacts.points = r.config;
  rep.artifacts.energies.push_back({500, r.report.total, r.report.total / tau_eval(s, 1, 500),
                                    r.iterations, r.converged, r.start_index});
}

// --- criterion 5 ---------------------------------------------------------
void separation_recipe(RecipeReport& rep, const RecipeOptions& ro) {
  const std::vector<int> ns{16, 32, 64, 128, 256, 512};
  struct Case {
    std::string name;
    EmbeddedSet set;
    double s;
    double alpha;
  };
  const std::vector<Case> cases{{"circle", EmbeddedSet::circle(1.0), 2.0, 1.0},
                                {"sphere2", EmbeddedSet::sphere2(1.0), 4.0, 2.0}};
  Json summary = Json::object();
  for (const Case& c : cases) {
    const auto set = share(c.set);
    const int d = static_cast<int>(set->hausdorff_dim());
    const Sweep sw = run_sweep(set, ns, c.s, d, unit_weight(), base_options(ro, 2));
    const SeparationSeries series = separation_series(sw.results, c.s, c.alpha);
    rep.checks.push_back(
        at_least(c.name + ": running min of delta*N^(1/alpha)", series.running_min(), 0.5));
    summary[c.name] = to_json(series);
    if (c.name == "sphere2") {
      rep.artifacts.separation = series;
      rep.artifacts.energies = sw.rows;
    }
  }
  rep.artifacts.summary = summary;
}

// --- criterion 6 ---------------------------------------------------------
void split_recipe(RecipeReport& rep, const RecipeOptions& ro) {
  std::vector<EmbeddedSet::Placement> parts;
  parts.push_back({EmbeddedSet::circle(1.0), Point{0.0, 0.0}});
  parts.push_back({EmbeddedSet::circle(2.0), Point{5.0, 0.0}});
  const auto set = share(EmbeddedSet::disjoint_union(parts));
  const double s = 2.0;
  const double c = known_constant(s, 1).value.value();
  const double g_b = theoretical_g_from_measure(set->component_measure(0), s, 1, c);
  const double g_d = theoretical_g_from_measure(set->component_measure(1), s, 1, c);
  const double predicted = split_fraction(g_b, g_d, s, 1);
  rep.checks.push_back(absolute("predicted share of the small circle", predicted, 1.0 / 3.0, 1e-12));

  OptimizeOptions o = base_options(ro, 2);
  o.exchange_rounds = 60;
  const int n = 300;
  const OptimizeResult r = minimize(set, n, s, unit_weight(), o);
  std::size_t on_b = 0;
  for (const Point& p : r.config.points()) on_b += set->component_of(p) == 0 ? 1 : 0;
  const double share_b = static_cast<double>(on_b) / n;
  rep.checks.push_back(absolute("observed share of the small circle", share_b, predicted, 0.03));
  rep.artifacts.points = r.config;
  rep.artifacts.summary = Json{{"points_on_small_circle", on_b},
                               {"N", n},
                               {"observed", share_b},
                               {"predicted", predicted},
                               {"exchanges", r.exchanges}};
}

// --- criterion 7 ---------------------------------------------------------
void sink_recipe(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::sphere2(1.0));
  const double s = 2.0, t = 4.0;
  const OptimizeResult r = minimize(set, 64, s, unit_weight(), base_options(ro, 1));
  const WeightFn w = power_zero_weight(Point(3), t);
  const double e1 = energy(r.config, s, w).total;
  for (double gamma : {0.5, 0.25}) {
    const std::string label = "E(gamma*w)/E(w) at gamma=" + format_double(gamma);
    try {
      const double eg = scaled_energy(r.config, gamma, s, w);
      rep.checks.push_back(relative(label, eg / e1, std::pow(gamma, t - s), 1e-12));
    } catch (const Error& e) {
      rep.checks.push_back(failed(label, e.what()));
    }
  }
  rep.artifacts.points = r.config;
}

// --- criterion 8 ---------------------------------------------------------
void zero_weight_recipe(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::circle(1.0));
  const double s = 2.0;
  const WeightFn w = power_zero_weight(Point{1.0, 0.0}, 1.0);
  const OptimizeResult r = minimize(set, 500, s, w, base_options(ro, 2));
  const RegionPartition part = RegionPartition::grid(*set, {20});
  const DistributionTest dt = distribution_test(r.config, w, s, 1, part);
  // The zero sits at angle 0, between the first and last bins.
  const std::size_t first = 0, last = part.size() - 1;
  double inner = 0.0;
  for (std::size_t i = 0; i < part.size(); ++i)
    if (i != first && i != last) inner = std::max(inner, std::fabs(dt.empirical[i] - dt.target[i]));
  rep.checks.push_back(absolute("sup error away from the zero", inner, 0.0, 0.05));
  rep.checks.push_back(absolute("joint mass of the two bins at the zero",
                                dt.empirical[first] + dt.empirical[last],
                                dt.target[first] + dt.target[last], 0.05));
  rep.artifacts.distribution = dt;
  rep.artifacts.points = r.config;
}

// --- criterion 9 ---------------------------------------------------------
void torus_recipe(RecipeReport& rep, const RecipeOptions& ro) {
  const auto set = share(EmbeddedSet::flat_torus(1.0, std::sqrt(3.0) / 2.0));
  const double s = 4.0;
  const std::vector<int> ns{100, 144, 196, 400};
  const Sweep sw = run_sweep(set, ns, s, 2, unit_weight(), base_options(ro, 2));
  const ScalingFit fit = fit_g(sw.pairs, s, 2, set->measure());
  const double bound = known_constant(s, 2).value.value();
  Check lo = at_least("C_hat >= 0.80 * (sqrt(3)/2)^2 * zeta_L(4)", fit.c_hat, 0.80 * bound);
  Check hi;
  hi.label = "C_hat <= 1.05 * (sqrt(3)/2)^2 * zeta_L(4)";
  hi.measured = fit.c_hat;
  hi.expected = 1.05 * bound;
  hi.passed = fit.c_hat <= 1.05 * bound;
  hi.note = "upper bound";
  rep.checks.push_back(lo);
  rep.checks.push_back(hi);
  Json j = to_json(fit);
  j["conjectured_c"] = bound;
  j["ratio"] = fit.c_hat / bound;
  rep.artifacts.fit = j;
  rep.artifacts.energies = sw.rows;
  rep.artifacts.points = sw.results.back().config;
}

// --- criterion 10 --------------------------------------------------------
std::vector<Point> random_points(const EmbeddedSet& set, std::size_t n, Rng& rng) {
  std::vector<Point> pts;
  while (pts.size() < n) {
    const Point p = set.sample(rng);
    bool ok = true;
    for (const Point& q : pts) ok = ok && distance(p, q) > 1e-3 * set.diameter();
    if (ok) pts.push_back(p);
  }
  return pts;
}

void property_suites(RecipeReport& rep, const RecipeOptions& ro) {
  Rng rng(ro.seed ^ 0x9a0b5eedULL);

  // Gradient against a central difference along a random direction.
  struct GradCase {
    std::shared_ptr<const EmbeddedSet> set;
    double s;
    std::function<WeightFn(const EmbeddedSet&)> weight;
  };
  const auto circle = share(EmbeddedSet::circle(1.0));
  const std::vector<GradCase> cases{
      {circle, 2.0, [](const EmbeddedSet&) { return unit_weight(); }},
      {share(EmbeddedSet::sphere2(1.0)), 4.0, [](const EmbeddedSet&) { return unit_weight(); }},
      {share(EmbeddedSet::flat_torus(1.0, 0.5)), 3.0, [](const EmbeddedSet&) { return unit_weight(); }},
      {share(EmbeddedSet::interval(1.0)), 1.5, [](const EmbeddedSet&) { return unit_weight(); }},
      {circle, 2.0,
       [](const EmbeddedSet& a) { return density_weight(named_density("cosine", a, 0.5), 2.0, 1, a); }},
      {circle, 2.0, [](const EmbeddedSet&) { return power_zero_weight(Point{1.0, 0.0}, 1.5); }},
      {share(EmbeddedSet::sphere2(1.0)), 3.0,
       [](const EmbeddedSet& a) { return density_weight(named_density("zonal", a, 0.3), 3.0, 2, a); }},
  };
  double worst_grad = 0.0;
  for (int k = 0; k < 50; ++k) {
    const GradCase& c = cases[static_cast<std::size_t>(k) % cases.size()];
    const WeightFn w = c.weight(*c.set);
    const std::vector<Point> pts = random_points(*c.set, 12, rng);
    PairOptions po;
    po.distance_floor = 1e-14;
    const std::vector<Point> g = energy_gradient(pts, c.s, w, po);
    std::vector<Point> v;
    for (const Point& p : pts) {
      Point d(p.dim);
      for (std::size_t i = 0; i < p.dim; ++i) d[i] = 2.0 * uniform01(rng) - 1.0;
      v.push_back(d);
    }
    double analytic = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      analytic += dot(g[i], v[i]);
      scale += norm(g[i]) * norm(v[i]);
    }
    const double h = 1e-6 * c.set->diameter();
    auto e_at = [&](double t) {
      std::vector<Point> q = pts;
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += v[i] * t;
      return try_energy_total(q, c.s, w, po).value();
    };
    const double fd = (e_at(h) - e_at(-h)) / (2 * h);
    worst_grad = std::max(worst_grad, std::fabs(fd - analytic) / std::max(std::fabs(analytic), 1e-3 * scale));
  }
  Check grad = absolute("gradient vs central differences, 50 configs (max rel error)", worst_grad, 0.0, 1e-5);
  rep.checks.push_back(grad);

  // Invariances of the unit-weight energy on the circle.
  {
    const std::vector<Point> pts = random_points(*circle, 40, rng);
    const double s = 2.0;
    const Configuration base(circle, pts);
    const double e = energy(base, s, unit_weight()).total;
    std::vector<Point> perm(pts.rbegin(), pts.rend());
    std::rotate(perm.begin(), perm.begin() + 7, perm.end());
    const double e_perm = energy(Configuration(circle, perm), s, unit_weight()).total;
    std::vector<Point> rot;
    const double th = 0.731;
    for (const Point& p : pts)
      rot.push_back(Point{std::cos(th) * p[0] - std::sin(th) * p[1], std::sin(th) * p[0] + std::cos(th) * p[1]});
    const double e_rot = energy(Configuration(circle, rot), s, unit_weight()).total;
    std::vector<Point> scaled;
    const double gamma = 1.7;
    for (const Point& p : pts) scaled.push_back(p * gamma);
    PairOptions po;
    po.distance_floor = 1e-14;
    const double e_scaled = try_energy_total(scaled, s, unit_weight(), po).value();
    rep.checks.push_back(relative("permutation invariance", e_perm, e, 1e-12));
    rep.checks.push_back(relative("rotation invariance", e_rot, e, 1e-12));
    rep.checks.push_back(relative("homogeneity E(g*x) = g^-s E(x)", e_scaled, std::pow(gamma, -s) * e, 1e-12));

    const WeightFn raw = custom_weight([](const Point& x, const Point& y) {
      return 1.0 + x[0] * x[0] + 0.25 * (1.0 + y[1]) + 0.1 * x[1] * y[0] * y[0];
    });
    const double e_raw = energy(base, s, raw).total;
    const double e_sym = energy(base, s, symmetrize(raw)).total;
    Check sym = absolute("symmetrization E^w = E^(w~) (exact)", e_sym - e_raw, 0.0, 0.0);
    rep.checks.push_back(sym);

    const WeightFn dens = density_weight(named_density("cosine", *circle, 0.5), s, 1, *circle);
    const EnergyReport er = energy(base, s, dens);
    rep.checks.push_back(relative("sum of point potentials = E", compensated_sum(er.per_point), er.total, 1e-12));
  }

  // Normalisation of the limit distribution on a fine partition.
  {
    const WeightFn dens = density_weight(named_density("cosine", *circle, 0.5), 2.0, 1, *circle);
    const WeightedMeasure m = weighted_hausdorff(*circle, dens, 2.0, 1, RegionPartition::grid(*circle, {37}));
    rep.checks.push_back(absolute("h_d^{s,w}(A) = 1", compensated_sum(m.normalized), 1.0, 1e-10));
    const double whole = weighted_hausdorff_total(*circle, dens, 2.0, 1);
    rep.checks.push_back(relative("partition total = whole-set total", m.total, whole, 1e-10));
  }

  // fit_g recovers its own model.
  {
    const double g = 0.37, a = 2.5, p = 0.8;
    std::vector<std::pair<long long, double>> pairs;
    for (long long n = 16; n <= 4096; n *= 2)
      pairs.emplace_back(n, tau_eval(3.0, 1, n) * g * (1.0 + a * std::pow(static_cast<double>(n), -p)));
    const ScalingFit fit = fit_g(pairs, 3.0, 1);
    rep.checks.push_back(relative("fit_g round trip: g", fit.g_hat, g, 1e-6));
    rep.checks.push_back(relative("fit_g round trip: a", fit.a, a, 1e-6));
    rep.checks.push_back(relative("fit_g round trip: p", fit.p, p, 1e-6));
  }
}

struct Entry {
  RecipeInfo info;
  bool fatal;
  void (*run)(RecipeReport&, const RecipeOptions&);
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list{
      {{"circle-s2-constant", 1, "circle, s=2: fitted g = 1/12 and E(N) = N(N^2-1)/12"}, true, circle_s2},
      {{"interval-s3-constant", 2, "interval [0,1], s=3: fitted g = 2*zeta(3)"}, true, interval_s3},
      {{"circle-s1-transition", 3, "circle, s=d=1: E/(N^2 ln N) -> 1/pi from exact sums"}, true, circle_s1},
      {{"density-circle", 4, "circle, prescribed density (1+cos/2)/(2pi): bin error <= 0.03"}, true,
       density_circle},
      {{"separation", 5, "circle and sphere2: normalized separation stays >= 0.5"}, true, separation_recipe},
      {{"split-fraction", 6, "two circles of lengths 2pi and 4pi: share on the small one = 1/3"}, true,
       split_recipe},
      {{"sink-scaling", 7, "w = |x|^4 + |y|^4, s=2: E(gamma*w) = gamma^2 E(w)"}, true, sink_recipe},
      {{"zero-weight-distribution", 8, "circle, zero of order 1: bins follow w(x,x)^(-1/2)"}, true,
       zero_weight_recipe},
      {{"torus-planar-constant", 9, "flat torus, s=4: C_hat near (sqrt(3)/2)^2 zeta_L(4) (soft)"}, false,
       torus_recipe},
      {{"property-suites", 10, "gradient, invariance, normalisation and fit round-trip properties"}, true,
       property_suites},
  };
  return list;
}

}  // namespace

bool RecipeReport::passed() const {
  if (checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Json RecipeReport::to_json() const {
  Json j;
  j["recipe"] = name;
  j["criterion"] = criterion;
  j["fatal"] = fatal;
  j["passed"] = passed();
  j["seconds"] = seconds;
  Json list = Json::array();
  for (const Check& c : checks) {
    Json e;
    e["label"] = c.label;
    e["passed"] = c.passed;
    e["measured"] = std::isfinite(c.measured) ? Json(c.measured) : Json(format_double(c.measured));
    e["expected"] = c.expected;
    e["tolerance"] = c.tolerance;
    e["kind"] = c.note;
    list.push_back(e);
  }
  j["checks"] = list;
  return j;
}

const std::vector<RecipeInfo>& recipe_catalog() {
  static const std::vector<RecipeInfo> list = [] {
    std::vector<RecipeInfo> out;
    for (const Entry& e : entries()) out.push_back(e.info);
    return out;
  }();
  return list;
}

RecipeReport run_recipe(std::string_view name, const RecipeOptions& opts) {
  for (const Entry& e : entries()) {
    if (e.info.name != name) continue;
    RecipeReport rep;
    rep.name = e.info.name;
    rep.criterion = e.info.criterion;
    rep.fatal = e.fatal;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(rep, opts);
    } catch (const Error& err) {
      rep.checks.push_back(failed("recipe aborted", std::string(to_string(err.kind())) + ": " + err.what()));
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown recipe '" + std::string(name) + "'");
}

std::string format_report(const RecipeReport& rep) {
  std::ostringstream out;
  const bool ok = rep.passed();
  out << (ok ? "PASS" : "FAIL") << " criterion " << rep.criterion << ' ' << rep.name;
  if (!ok && !rep.fatal) out << " (soft, reported only)";
  char secs[32];
  std::snprintf(secs, sizeof secs, " [%.1fs]", rep.seconds);
  out << secs << '\n';
  for (const Check& c : rep.checks) {
    out << "    " << (c.passed ? "ok  " : "bad ") << c.label << ": measured " << format_double(c.measured);
    if (c.note == "relative" || c.note == "absolute")
    {
      char tol[32];
      std::snprintf(tol, sizeof tol, "%g", c.tolerance);
      out << ", expected " << format_double(c.expected) << " (" << c.note << " tol " << tol << ")";
    }
    else if (c.note == "lower bound")
      out << ", floor " << format_double(c.expected);
    else if (c.note == "upper bound")
      out << ", ceiling " << format_double(c.expected);
    else
      out << " (" << c.note << ")";
    out << '\n';
  }
  return out.str();
}

}  // namespace riesz
