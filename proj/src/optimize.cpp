#include "riesz/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "riesz/error.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

// Draws initial points: H_d-uniform for the unit weight, otherwise from the
// limit density w(x,x)^(-d/s) (tabulated inverse CDF on curves, rejection
// sampling on surfaces when the density is bounded).
class Initializer {
 public:
  Initializer(const EmbeddedSet& set, const WeightFn& w, double s, bool weighted)
      : set_(set) {
    if (!weighted || w.is_unit()) return;
    const ScalarFn density = weighted_density(w, s, static_cast<int>(set.hausdorff_dim()));
    bool curves = true;
    for (std::size_t c = 0; c < set.component_count(); ++c)
      curves = curves && set.chart(c).param_dim == 1;
    if (curves) {
      build_tables(density);
    } else {
      build_rejection(density);
    }
  }

  Point draw(Rng& rng) const {
    if (!cdf_.empty()) return draw_tabulated(rng);
    if (bound_ > 0.0) {
      for (int attempt = 0; attempt < 10000; ++attempt) {
        const Point p = set_.sample(rng);
        const double v = density_(p);
        if (std::isfinite(v) && uniform01(rng) * bound_ <= v) return p;
      }
    }
    return set_.sample(rng);
  }

 private:
  static constexpr std::size_t kCells = 4096;

  void build_tables(const ScalarFn& density) {
    double total = 0.0;
    for (std::size_t c = 0; c < set_.component_count(); ++c) {
      const Chart& ch = set_.chart(c);
      const double h = (ch.hi[0] - ch.lo[0]) / static_cast<double>(kCells);
      std::vector<double> cdf(kCells);
      double acc = 0.0;
      for (std::size_t k = 0; k < kCells; ++k) {
        const double u = ch.lo[0] + (static_cast<double>(k) + 0.5) * h;
        double v = density(set_.from_param(c, std::span<const double>(&u, 1)));
        if (!std::isfinite(v) || v < 0.0) v = 0.0;
        acc += v * h * ch.jacobian;
        cdf[k] = acc;
      }
      total += acc;
      component_mass_.push_back(total);
      cdf_.push_back(std::move(cdf));
    }
    if (!(total > 0.0)) cdf_.clear();
  }

  void build_rejection(const ScalarFn& density) {
    Rng rng(0xb0b0ULL);
    double hi = 0.0;
    for (int i = 0; i < 4096; ++i) {
      const double v = density(set_.sample(rng));
      if (!std::isfinite(v)) return;
      hi = std::max(hi, v);
    }
    density_ = density;
    bound_ = 1.5 * hi;
  }

  Point draw_tabulated(Rng& rng) const {
    const double target = uniform01(rng) * component_mass_.back();
    std::size_t c = static_cast<std::size_t>(
        std::upper_bound(component_mass_.begin(), component_mass_.end(), target) -
        component_mass_.begin());
    c = std::min(c, cdf_.size() - 1);
    const auto& cdf = cdf_[c];
    const double local = uniform01(rng) * cdf.back();
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), local) -
                                             cdf.begin());
    k = std::min(k, kCells - 1);
    const Chart& ch = set_.chart(c);
    const double h = (ch.hi[0] - ch.lo[0]) / static_cast<double>(kCells);
    const double u = ch.lo[0] + (static_cast<double>(k) + uniform01(rng)) * h;
    return set_.from_param(c, std::span<const double>(&u, 1));
  }

  const EmbeddedSet& set_;
  std::vector<std::vector<double>> cdf_;
  std::vector<double> component_mass_;
  ScalarFn density_;
  double bound_ = 0.0;
};

struct Descent {
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

double tangent_step_cap(const EmbeddedSet& set, std::size_t n) {
  const double d = static_cast<double>(set.hausdorff_dim());
  return 0.25 * set.diameter() / std::pow(static_cast<double>(n), 1.0 / d);
}

double field_dot(const std::vector<Point>& a, const std::vector<Point>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += dot(a[i], b[i]);
  return acc;
}

// Projected gradient descent with Armijo backtracking. The steepest tangent
// direction is preconditioned with a limited-memory BFGS estimate built from
// previous tangent steps; if that stops being a descent direction the memory
// is dropped. Only energy-decreasing steps are accepted, so the accepted
// energies are non-increasing.
Descent descend(const EmbeddedSet& set, std::vector<Point>& pts, double s, const WeightFn& w,
                const OptimizeOptions& opts, unsigned workers) {
  constexpr std::size_t kMemory = 8;
  const std::size_t n = pts.size();
  PairOptions pair;
  pair.distance_floor = 1e-14 * set.diameter();
  pair.workers = workers;

  Descent out;
  const auto e0 = try_energy_total(pts, s, w, pair);
  if (!e0) throw Error(ErrorKind::CoincidentPoints, "initial configuration has coincident points");
  out.energy = *e0;
  if (opts.keep_trace) out.trace.push_back(out.energy);

  // Tangent steepest-descent field (minus the projected gradient).
  auto project = [&](const std::vector<Point>& at, const std::vector<Point>& g,
                     std::vector<Point>& sd) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sd[i] = set.project_direction(at[i], -g[i]);
      worst = std::max(worst, norm(sd[i]));
    }
    return worst;
  };
  auto grad = energy_gradient(pts, s, w, pair);
  std::vector<Point> sd(n);
  double max_sd = project(pts, grad, sd);
  const double cap = tangent_step_cap(set, n);
  const double scale = static_cast<double>(n) * set.diameter();

  std::vector<std::vector<Point>> mem_s, mem_y;
  std::vector<double> mem_rho;
  std::vector<Point> dir(n), trial(n), new_sd(n);
  // Accepted steps that leave E bit-identical: the energy can no longer
  // resolve the remaining gradient, so further iterations are wasted.
  int flat_steps = 0;

  for (int it = 0; it < opts.max_iters; ++it) {
    if (max_sd <= opts.grad_tol * out.energy / scale) {
      out.converged = true;
      break;
    }

    // Two-loop recursion on q = -sd.
    double alpha = 1.0;
    bool quasi = !mem_s.empty();
    if (quasi) {
      std::vector<Point> q(n);
      for (std::size_t i = 0; i < n; ++i) q[i] = -sd[i];
      std::vector<double> a(mem_s.size());
      for (std::size_t k = mem_s.size(); k-- > 0;) {
        a[k] = mem_rho[k] * field_dot(mem_s[k], q);
        for (std::size_t i = 0; i < n; ++i) q[i] -= mem_y[k][i] * a[k];
      }
      const std::size_t last = mem_s.size() - 1;
      const double gamma = field_dot(mem_s[last], mem_y[last]) / field_dot(mem_y[last], mem_y[last]);
      for (std::size_t i = 0; i < n; ++i) q[i] = q[i] * gamma;
      for (std::size_t k = 0; k < mem_s.size(); ++k) {
        const double b = mem_rho[k] * field_dot(mem_y[k], q);
        for (std::size_t i = 0; i < n; ++i) q[i] += mem_s[k][i] * (a[k] - b);
      }
      for (std::size_t i = 0; i < n; ++i) dir[i] = set.project_direction(pts[i], -q[i]);
      const double slope = field_dot(sd, dir);
      if (!(slope > 1e-10 * std::sqrt(field_dot(sd, sd) * field_dot(dir, dir)))) {
        quasi = false;
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
      }
    }
    if (!quasi) {
      dir = sd;
      alpha = 0.1 * cap / max_sd;
    }
    double max_dir = 0.0;
    for (const Point& d : dir) max_dir = std::max(max_dir, norm(d));
    alpha = std::min(alpha, cap / max_dir);

    bool accepted = false;
    double trial_energy = 0.0;
    for (int k = 0; k < 80 && !accepted; ++k, alpha *= opts.backtrack) {
      bool ok = true;
      CompensatedSum slope;
      for (std::size_t i = 0; i < n && ok; ++i) {
        try {
          trial[i] = set.retract(pts[i] + dir[i] * alpha);
        } catch (const Error&) {
          ok = false;
          break;
        }
        slope += dot(grad[i], trial[i] - pts[i]);
      }
      if (!ok) continue;
      const auto e = try_energy_total(trial, s, w, pair);
      if (!e) continue;  // collapsed pair: shrink the step
      if (*e <= out.energy && *e <= out.energy + opts.armijo * slope.value()) {
        accepted = true;
        trial_energy = *e;
        break;
      }
    }
    if (!accepted) {
      if (quasi) {
        // Retry from plain steepest descent before giving up.
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
        continue;
      }
      break;
    }

    flat_steps = trial_energy < out.energy ? 0 : flat_steps + 1;
    if (flat_steps >= 3) break;

    auto new_grad = energy_gradient(trial, s, w, pair);
    const double new_max = project(trial, new_grad, new_sd);
    std::vector<Point> step(n), dy(n);
    for (std::size_t i = 0; i < n; ++i) {
      step[i] = trial[i] - pts[i];
      dy[i] = sd[i] - new_sd[i];
    }
    const double sy = field_dot(step, dy);
    if (sy > 1e-12 * std::sqrt(field_dot(step, step) * field_dot(dy, dy))) {
      if (mem_s.size() == kMemory) {
        mem_s.erase(mem_s.begin());
        mem_y.erase(mem_y.begin());
        mem_rho.erase(mem_rho.begin());
      }
      mem_s.push_back(std::move(step));
      mem_y.push_back(std::move(dy));
      mem_rho.push_back(1.0 / sy);
    }

    pts.swap(trial);
    grad.swap(new_grad);
    sd.swap(new_sd);
    max_sd = new_max;
    out.energy = trial_energy;
    out.iterations = it + 1;
    if (opts.keep_trace) out.trace.push_back(out.energy);
  }
  if (!out.converged && max_sd <= opts.grad_tol * out.energy / scale) out.converged = true;
  return out;
}

// Moves the point of largest potential to the best of a batch of sampled
// locations and re-relaxes; kept only if the relaxed energy drops.
int polish(const EmbeddedSet& set, std::vector<Point>& pts, Descent& state, double s,
           const WeightFn& w, const OptimizeOptions& opts, unsigned workers, Rng& rng) {
  int moves = 0;
  const std::size_t n = pts.size();
  for (int round = 0; round < opts.exchange_rounds; ++round) {
    std::size_t worst = 0;
    double worst_u = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = point_potential(pts[i], pts, i, s, w);
      if (u > worst_u) {
        worst_u = u;
        worst = i;
      }
    }
    // Candidates inside the hole the point leaves behind would just put it
    // back, so they must clear twice its nearest-neighbour distance.
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != worst) nearest = std::min(nearest, distance(pts[j], pts[worst]));
    Point best;
    double best_u = std::numeric_limits<double>::infinity();
    for (int c = 0; c < opts.exchange_candidates; ++c) {
      const Point y = set.sample(rng);
      if (distance(y, pts[worst]) <= 2.0 * nearest) continue;
      const double u = point_potential(y, pts, worst, s, w);
      if (u < best_u) {
        best_u = u;
        best = y;
      }
    }
    if (!std::isfinite(best_u)) break;
    std::vector<Point> candidate = pts;
    candidate[worst] = best;
    Descent relaxed;
    try {
      relaxed = descend(set, candidate, s, w, opts, workers);
    } catch (const Error&) {
      break;
    }
    if (!(relaxed.energy < state.energy * (1.0 - 1e-12))) break;
    pts.swap(candidate);
    relaxed.iterations += state.iterations;
    if (opts.keep_trace) {
      std::vector<double> t = state.trace;
      t.insert(t.end(), relaxed.trace.begin(), relaxed.trace.end());
      relaxed.trace = std::move(t);
    }
    state = std::move(relaxed);
    ++moves;
  }
  return moves;
}

struct StartOutcome {
  bool ok = false;
  std::string error;
  std::vector<Point> points;
  Descent descent;
  int exchanges = 0;
};

StartOutcome run_start(const EmbeddedSet& set, int n, double s, const WeightFn& w,
                       const OptimizeOptions& opts, unsigned workers, std::uint64_t seed,
                       const Initializer& init, const std::vector<Point>* warm) {
  StartOutcome out;
  Rng rng(seed);
  try {
    if (warm) {
      out.points = *warm;
    } else {
      out.points.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) out.points.push_back(init.draw(rng));
    }
    out.descent = descend(set, out.points, s, w, opts, workers);
    if (opts.exchange_rounds > 0)
      out.exchanges = polish(set, out.points, out.descent, s, w, opts, workers, rng);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

void validate(int n, double s, const OptimizeOptions& opts) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two points");
  if (!(std::isfinite(s) && s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  if (opts.starts < 1 || opts.max_iters < 0 || !(opts.grad_tol > 0.0) ||
      !(opts.backtrack > 0.0 && opts.backtrack < 1.0) || !(opts.armijo > 0.0 && opts.armijo < 1.0) ||
      opts.exchange_rounds < 0 || opts.exchange_candidates < 1)
    throw Error(ErrorKind::InvalidArgument, "invalid optimizer options");
}

OptimizeResult minimize_impl(std::shared_ptr<const EmbeddedSet> set, int n, double s,
                             const WeightFn& w, const OptimizeOptions& opts,
                             const std::vector<Point>* warm) {
  validate(n, s, opts);
  if (!set) throw Error(ErrorKind::InvalidArgument, "minimize needs a set");
  const Initializer init(*set, w, s, opts.weighted_init);
  const std::size_t starts = static_cast<std::size_t>(opts.starts);
  std::vector<StartOutcome> outcomes(starts);

  auto seed_for = [&](std::size_t k) {
    return stream_seed(opts.seed, static_cast<std::uint64_t>(n), k);
  };
  const bool outer_parallel = opts.workers > 1 && starts > 1;
  if (outer_parallel) {
    std::vector<std::jthread> threads;
    const std::size_t used = std::min<std::size_t>(opts.workers, starts);
    for (std::size_t t = 0; t < used; ++t) {
      threads.emplace_back([&, t] {
        for (std::size_t k = t; k < starts; k += used)
          outcomes[k] = run_start(*set, n, s, w, opts, 1, seed_for(k), init,
                                  k == 0 ? warm : nullptr);
      });
    }
  } else {
    for (std::size_t k = 0; k < starts; ++k)
      outcomes[k] = run_start(*set, n, s, w, opts, opts.workers, seed_for(k), init,
                              k == 0 ? warm : nullptr);
  }

  std::optional<std::size_t> best;
  int failed = 0;
  std::string last_error;
  for (std::size_t k = 0; k < starts; ++k) {
    if (!outcomes[k].ok) {
      ++failed;
      last_error = outcomes[k].error;
      continue;
    }
    if (!best || outcomes[k].descent.energy < outcomes[*best].descent.energy) best = k;
  }
  if (!best) throw Error(ErrorKind::OptimizationFailed, "all starts failed: " + last_error);

  StartOutcome& win = outcomes[*best];
  Provenance prov;
  prov.seed = opts.seed;
  prov.generator = "minimize/start-" + std::to_string(*best);
  Configuration config(set, std::move(win.points), prov);
  EnergyReport report = energy(config, s, w, opts.workers);
  OptimizeResult result(std::move(config), std::move(report));
  result.iterations = win.descent.iterations;
  result.converged = win.descent.converged;
  result.start_index = static_cast<int>(*best);
  result.failed_starts = failed;
  result.exchanges = win.exchanges;
  result.trace = std::move(win.descent.trace);
  return result;
}

}  // namespace

OptimizeResult minimize(std::shared_ptr<const EmbeddedSet> set, int n, double s, const WeightFn& w,
                        const OptimizeOptions& opts) {
  return minimize_impl(std::move(set), n, s, w, opts, nullptr);
}

std::vector<OptimizeResult> minimize_sequence(std::shared_ptr<const EmbeddedSet> set,
                                              std::span<const int> ns, double s, const WeightFn& w,
                                              const OptimizeOptions& opts) {
  if (ns.empty()) throw Error(ErrorKind::InvalidArgument, "N list is empty");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw Error(ErrorKind::InvalidArgument, "N list must be increasing");
  if (!set) throw Error(ErrorKind::InvalidArgument, "minimize needs a set");

  std::vector<OptimizeResult> results;
  const Initializer init(*set, w, s, opts.weighted_init);
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    if (idx == 0) {
      results.push_back(minimize_impl(set, ns[idx], s, w, opts, nullptr));
      continue;
    }
    const auto prev = results.back().config.points();
    std::vector<Point> warm(prev.begin(), prev.end());
    Rng rng(stream_seed(opts.seed, static_cast<std::uint64_t>(ns[idx]), 0x3a7eULL));
    while (warm.size() < static_cast<std::size_t>(ns[idx])) warm.push_back(init.draw(rng));
    results.push_back(minimize_impl(set, ns[idx], s, w, opts, &warm));
  }
  return results;
}

OptimizeResult refine(const Configuration& start, double s, const WeightFn& w,
                      const OptimizeOptions& opts) {
  validate(static_cast<int>(start.size()), s, opts);
  const EmbeddedSet& set = start.set();
  std::vector<Point> pts(start.points().begin(), start.points().end());
  Descent d = descend(set, pts, s, w, opts, opts.workers);
  Rng rng(stream_seed(opts.seed, start.size(), 0x9e11ULL));
  int moves = 0;
  if (opts.exchange_rounds > 0) moves = polish(set, pts, d, s, w, opts, opts.workers, rng);
  Provenance prov = start.provenance();
  prov.generator += "+refine";
  Configuration config(start.set_ptr(), std::move(pts), prov);
  EnergyReport report = energy(config, s, w, opts.workers);
  OptimizeResult result(std::move(config), std::move(report));
  result.iterations = d.iterations;
  result.converged = d.converged;
  result.exchanges = moves;
  result.trace = std::move(d.trace);
  return result;
}

}  // namespace riesz
