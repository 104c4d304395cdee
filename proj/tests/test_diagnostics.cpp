#include <doctest.h>

#include <cmath>
#include <numbers>

#include "riesz/diagnostics.hpp"
#include "riesz/error.hpp"

using namespace riesz;
using std::numbers::pi;

namespace {

std::vector<Point> equally_spaced(int n, double phase = 0.0) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const double t = phase + 2 * pi * k / n;
    pts.push_back(Point{std::cos(t), std::sin(t)});
  }
  return pts;
}

}  // namespace

TEST_CASE("separation distance") {
  CHECK(separation(equally_spaced(4)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const std::vector<Point> two{Point{0.0, 0.0, 1.0}, Point{0.3, 0.4, 0.0}};
  CHECK(separation(two) == distance(two[0], two[1]));
  Rng rng(3);
  const auto sphere = EmbeddedSet::sphere2(1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(sphere.sample(rng));
  const double delta = separation(pts);
  CHECK(delta <= sphere.diameter());
  std::vector<Point> scaled;
  for (const Point& p : pts) scaled.push_back(p * 0.3);
  CHECK(separation(scaled) == doctest::Approx(0.3 * delta).epsilon(1e-14));
}

TEST_CASE("separation series") {
  std::vector<std::pair<long long, double>> rows;
  for (long long n : {64, 256, 1024, 4096}) rows.emplace_back(n, separation(equally_spaced(static_cast<int>(n))));
  const auto series = separation_series(rows, 2.0, 1.0);
  CHECK(series.entries.back().normalized == doctest::Approx(2 * pi).epsilon(1e-6));
  CHECK(series.bounded_below(6.0));

  const std::vector<std::pair<long long, double>> pair{{2, 2.0}};
  CHECK(separation_series(pair, 4.0, 2.0).entries[0].normalized == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));

  // delta = N^-2 on a curve: the normalized series decays to zero.
  std::vector<std::pair<long long, double>> bad;
  for (long long n = 16; n <= 4096; n *= 2) bad.emplace_back(n, 1.0 / (static_cast<double>(n) * n));
  const auto degenerate = separation_series(bad, 2.0, 1.0);
  CHECK(degenerate.running_min() < 1e-3);
  CHECK_FALSE(degenerate.bounded_below(0.5));
  for (std::size_t i = 1; i < degenerate.entries.size(); ++i)
    CHECK(degenerate.entries[i].running_min <= degenerate.entries[i - 1].running_min);
}

TEST_CASE("distribution test arithmetic") {
  const auto circle = EmbeddedSet::circle(1.0);
  const auto part = RegionPartition::grid(circle, {4});
  const auto pts = equally_spaced(8, 0.1);
  const std::vector<double> uniform(4, 0.25);
  const auto t = distribution_test(pts, part, uniform);
  CHECK(t.sup_error == 0.0);
  double total = 0.0;
  for (double e : t.empirical) total += e;
  CHECK(total == 1.0);

  // Everything in one of k = 4 equal cells.
  const std::vector<Point> clustered{Point{1.0, 0.0}, Point{std::cos(0.1), std::sin(0.1)}, Point{std::cos(0.2), std::sin(0.2)}};
  CHECK(distribution_test(clustered, part, uniform).sup_error == doctest::Approx(0.75).epsilon(1e-15));

  const auto sp = std::make_shared<const EmbeddedSet>(circle);
  const auto u = distribution_test(Configuration(sp, pts), unit_weight(), 2.0, 1, part);
  for (std::size_t i = 0; i < part.size(); ++i) CHECK(u.target[i] == doctest::Approx(part[i].measure / (2 * pi)).epsilon(1e-12));
}

TEST_CASE("distribution error shrinks with N on the circle") {
  const auto set = std::make_shared<const EmbeddedSet>(EmbeddedSet::circle(1.0));
  const auto part = RegionPartition::grid(*set, {7});
  OptimizeOptions o;
  o.seed = 2;
  o.starts = 1;
  const auto small = minimize(set, 16, 2.0, unit_weight(), o);
  const auto large = minimize(set, 128, 2.0, unit_weight(), o);
  const double e_small = distribution_test(small.config, unit_weight(), 2.0, 1, part).sup_error;
  const double e_large = distribution_test(large.config, unit_weight(), 2.0, 1, part).sup_error;
  CHECK(e_large * 2 <= e_small);
}

TEST_CASE("split fraction") {
  CHECK(split_fraction(2.0, 2.0, 3.0, 1) == 0.5);
  CHECK(split_fraction(2.0, INFINITY, 3.0, 1) == 1.0);
  CHECK(split_fraction(INFINITY, 2.0, 3.0, 1) == 0.0);
  // Circles of length 2 pi and 4 pi: g = 2 zeta(2) / L^2.
  const double c = 2 * pi * pi / 6;
  const double gb = c / std::pow(2 * pi, 2), gd = c / std::pow(4 * pi, 2);
  CHECK(split_fraction(gb, gd, 2.0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  for (auto [a, b] : {std::pair{0.3, 7.0}, {1.0, 1e-3}, {42.0, 0.5}})
    CHECK(split_fraction(a, b, 2.5, 2) + split_fraction(b, a, 2.5, 2) == 1.0);
  CHECK_THROWS_AS(split_fraction(-1.0, 1.0, 2.0, 1), Error);
}

TEST_CASE("energy upper bound check") {
  std::vector<std::pair<long long, double>> circle;
  for (long long n : {16, 64, 256, 1024}) circle.emplace_back(n, n * (static_cast<double>(n) * n - 1) / 12);
  const auto r = energy_upper_bound_check(circle, 2.0, 1.0);
  CHECK(r.bounded);
  CHECK(r.max_ratio <= 1.0 / 12);
  CHECK(r.max_ratio == doctest::Approx((1 - 1.0 / (1024.0 * 1024)) / 12).epsilon(1e-14));

  // s = alpha = 1: exact equally spaced sums, ratio decreasing toward 1/pi.
  std::vector<std::pair<long long, double>> log_case;
  for (long long n = 16; n <= 4096; n *= 2) {
    const auto pts = equally_spaced(static_cast<int>(n));
    double e = 0.0;
    for (long long k = 1; k < n; ++k) e += n / distance(pts[0], pts[static_cast<std::size_t>(k)]);
    log_case.emplace_back(n, e);
  }
  const auto l = energy_upper_bound_check(log_case, 1.0, 1.0);
  for (std::size_t i = 1; i < l.ratios.size(); ++i) CHECK(l.ratios[i] < l.ratios[i - 1]);
  CHECK(l.ratios.back() > 1 / pi);

  const std::vector<std::pair<long long, double>> single{{10, 3.0}};
  const auto one = energy_upper_bound_check(single, 2.0, 1.0);
  CHECK(one.bounded);
  CHECK(std::isfinite(one.max_ratio));
  CHECK(one.max_ratio > 0.0);
}
