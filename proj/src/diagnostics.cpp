#include "riesz/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riesz/error.hpp"

namespace riesz {

double separation(std::span<const Point> points) {
  if (points.size() < 2) throw Error(ErrorKind::InvalidArgument, "separation needs N >= 2");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, distance2(points[i], points[j]));
  return std::sqrt(best);
}

double separation(const Configuration& config) { return separation(config.points()); }

SeparationSeries separation_series(std::span<const std::pair<long long, double>> n_delta,
                                   double s, double alpha) {
  if (n_delta.empty()) throw Error(ErrorKind::InvalidArgument, "separation series is empty");
  if (!(alpha > 0.0) || !(s >= alpha))
    throw Error(ErrorKind::InvalidArgument, "separation series needs s >= alpha > 0");
  std::vector<std::pair<long long, double>> rows(n_delta.begin(), n_delta.end());
  std::sort(rows.begin(), rows.end());
  SeparationSeries series;
  series.s = s;
  series.alpha = alpha;
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto [n, delta] = rows[k];
    if (k > 0 && n == rows[k - 1].first)
      throw Error(ErrorKind::InvalidArgument, "separation series has repeated N");
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "separation must be positive");
    const double nn = static_cast<double>(n);
    const double scale = s == alpha ? nn * std::log(nn) : nn;
    SeparationEntry e;
    e.n = n;
    e.delta = delta;
    e.normalized = delta * std::pow(scale, 1.0 / alpha);
    running = std::min(running, e.normalized);
    e.running_min = running;
    series.entries.push_back(e);
  }
  return series;
}

SeparationSeries separation_series(std::span<const OptimizeResult> results, double s, double alpha) {
  std::vector<std::pair<long long, double>> rows;
  for (const OptimizeResult& r : results)
    rows.emplace_back(static_cast<long long>(r.config.size()), separation(r.config));
  return separation_series(rows, s, alpha);
}

DistributionTest distribution_test(std::span<const Point> points, const RegionPartition& partition,
                                   std::span<const double> target) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "distribution test needs points");
  if (target.size() != partition.size())
    throw Error(ErrorKind::InvalidArgument, "target masses do not match the partition");
  DistributionTest t;
  t.counts.assign(partition.size(), 0);
  for (const Point& p : points) ++t.counts[partition.locate(p)];
  const double n = static_cast<double>(points.size());
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const double e = static_cast<double>(t.counts[i]) / n;
    t.empirical.push_back(e);
    t.target.push_back(target[i]);
    const double err = std::fabs(e - target[i]);
    t.sup_error = std::max(t.sup_error, err);
    t.l1_error += err;
  }
  return t;
}

DistributionTest distribution_test(const Configuration& config, const WeightFn& w, double s, int d,
                                   const RegionPartition& partition) {
  const WeightedMeasure target = weighted_hausdorff(config.set(), w, s, d, partition);
  return distribution_test(config.points(), partition, target.normalized);
}

double split_fraction(double g_b, double g_d, double s, int d) {
  if (std::isnan(g_b) || std::isnan(g_d) || !(g_b > 0.0) || !(g_d > 0.0))
    throw Error(ErrorKind::InvalidArgument, "split fraction needs positive g values");
  if (std::isinf(g_b) && std::isinf(g_d))
    throw Error(ErrorKind::InvalidArgument, "split fraction needs at least one finite g");
  if (!(s > 0.0) || d < 1) throw Error(ErrorKind::InvalidArgument, "need s > 0 and d >= 1");
  if (std::isinf(g_d)) return 1.0;
  if (std::isinf(g_b)) return 0.0;
  // Evaluate the share that is >= 1/2 directly and the other as its
  // complement, so f(b, d) + f(d, b) == 1 exactly.
  if (g_b > g_d) return 1.0 - split_fraction(g_d, g_b, s, d);
  const double e = static_cast<double>(d) / s;
  const double pb = std::pow(g_b, e);
  const double pd = std::pow(g_d, e);
  return pd / (pb + pd);
}

UpperBoundReport energy_upper_bound_check(std::span<const std::pair<long long, double>> pairs,
                                          double s, double alpha) {
  if (!(alpha > 0.0) || !(s >= alpha))
    throw Error(ErrorKind::InvalidArgument, "upper-bound check needs s >= alpha > 0");
  UpperBoundReport rep;
  rep.bounded = !pairs.empty();
  for (const auto& [n, e] : pairs) {
    const double nn = static_cast<double>(n);
    const double tau = s == alpha ? nn * nn * std::log(nn) : std::pow(nn, 1.0 + s / alpha);
    const double r = e / tau;
    rep.ratios.push_back(r);
    rep.bounded = rep.bounded && std::isfinite(r) && r > 0.0;
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  return rep;
}

}  // namespace riesz
