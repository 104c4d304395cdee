#pragma once

#include <span>
#include <utility>
#include <vector>

#include "riesz/energy.hpp"
#include "riesz/geometry.hpp"
#include "riesz/optimize.hpp"
#include "riesz/weights.hpp"

namespace riesz {

/// Minimum pairwise distance delta(omega_N).
double separation(std::span<const Point> points);
double separation(const Configuration& config);

struct SeparationEntry {
  long long n = 0;
  double delta = 0.0;
  double normalized = 0.0;      // delta * N^{1/alpha}, or delta * (N ln N)^{1/alpha} at s = alpha
  double running_min = 0.0;     // of `normalized` over this and earlier entries
};

struct SeparationSeries {
  double s = 0.0;
  double alpha = 0.0;
  std::vector<SeparationEntry> entries;
  double running_min() const { return entries.empty() ? 0.0 : entries.back().running_min; }
  /// True when the normalized separation stays above `floor` over the whole series.
  bool bounded_below(double floor) const { return running_min() >= floor; }
};

/// Builds the normalized separation series, sorted by N.
SeparationSeries separation_series(std::span<const std::pair<long long, double>> n_delta,
                                   double s, double alpha);
SeparationSeries separation_series(std::span<const OptimizeResult> results, double s, double alpha);

struct DistributionTest {
  std::vector<double> empirical;  // |omega_N cap B| / N
  std::vector<double> target;     // h_d^{s,w}(B)
  std::vector<std::size_t> counts;
  double sup_error = 0.0;
  double l1_error = 0.0;
};

/// Compares region frequencies with the normalized weighted Hausdorff measure.
DistributionTest distribution_test(const Configuration& config, const WeightFn& w, double s,
                                   int d, const RegionPartition& partition);
/// Same, against precomputed target masses.
DistributionTest distribution_test(std::span<const Point> points, const RegionPartition& partition,
                                   std::span<const double> target);

/// Limiting share of points on B for a minimiser on B cup D:
/// g_D^{d/s} / (g_B^{d/s} + g_D^{d/s}); 1 when g_D is infinite.
double split_fraction(double g_b, double g_d, double s, int d);

struct UpperBoundReport {
  std::vector<double> ratios;  // E / tau_{s,alpha}(N)
  double max_ratio = 0.0;      // empirical M
  bool bounded = false;        // all ratios finite and positive
};

/// E(N) / N^{1+s/alpha} (or E / (N^2 ln N) at s = alpha) across a series.
UpperBoundReport energy_upper_bound_check(std::span<const std::pair<long long, double>> pairs,
                                          double s, double alpha);

}  // namespace riesz
