#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "riesz/energy.hpp"
#include "riesz/geometry.hpp"
#include "riesz/weights.hpp"

namespace riesz {

struct OptimizeOptions {
  int max_iters = 2000;
  /// Stop once every projected-gradient component is below
  /// grad_tol * E / (N * diam(A)).
  double grad_tol = 1e-9;
  int starts = 8;
  double backtrack = 0.5;
  double armijo = 1e-4;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Rounds of move-the-worst-point polishing after descent (0 disables).
  int exchange_rounds = 0;
  int exchange_candidates = 256;
  /// Initialise from the limit density w(x,x)^(-d/s) instead of H_d-uniform
  /// draws when the weight is not the unit weight.
  bool weighted_init = true;
  /// Keep the per-iteration energy trace in the result.
  bool keep_trace = false;
};

struct OptimizeResult {
  OptimizeResult(Configuration c, EnergyReport r) : config(std::move(c)), report(std::move(r)) {}

  Configuration config;
  EnergyReport report;
  int iterations = 0;
  bool converged = false;
  int start_index = 0;
  int failed_starts = 0;
  int exchanges = 0;
  /// Energies of accepted iterates of the chosen start (when keep_trace).
  std::vector<double> trace;
};

/// Approximates an N-point (w, s)-energy minimiser on `set` by multi-start
/// projected gradient descent with Armijo backtracking. Deterministic given
/// the seed; independent of the worker count.
OptimizeResult minimize(std::shared_ptr<const EmbeddedSet> set, int n, double s,
                        const WeightFn& w, const OptimizeOptions& opts);

/// Optimises each N in increasing order. Start 0 of every N after the first
/// is warm-started from the previous optimum plus fresh draws.
std::vector<OptimizeResult> minimize_sequence(std::shared_ptr<const EmbeddedSet> set,
                                              std::span<const int> ns, double s,
                                              const WeightFn& w, const OptimizeOptions& opts);

/// Local refinement of a given configuration (one start, same line search).
OptimizeResult refine(const Configuration& start, double s, const WeightFn& w,
                      const OptimizeOptions& opts);

}  // namespace riesz
