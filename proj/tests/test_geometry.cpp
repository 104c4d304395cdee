#include <doctest.h>

#include <cmath>
#include <numbers>

#include "riesz/error.hpp"
#include "riesz/geometry.hpp"

using namespace riesz;
using std::numbers::pi;

namespace {

std::vector<EmbeddedSet> catalog() {
  return {EmbeddedSet::circle(1.0),
          EmbeddedSet::arc(2.0, 1.5),
          EmbeddedSet::interval(1.0),
          EmbeddedSet::cube(1.0, 2),
          EmbeddedSet::cube(0.5, 3),
          EmbeddedSet::sphere2(1.0),
          EmbeddedSet::flat_torus(1.0, std::sqrt(3.0) / 2),
          EmbeddedSet::disjoint_union({{EmbeddedSet::circle(1.0), Point{0.0, 0.0}},
                                       {EmbeddedSet::circle(2.0), Point{5.0, 0.0}}})};
}

}  // namespace

TEST_CASE("closed-form measures") {
  CHECK(hausdorff_measure(EmbeddedSet::circle(1.0)) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(hausdorff_measure(EmbeddedSet::cube(1.0, 2)) == 1.0);
  CHECK(hausdorff_measure(EmbeddedSet::sphere2(1.0)) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(hausdorff_measure(EmbeddedSet::interval(2.5)) == 2.5);
  CHECK(hausdorff_measure(EmbeddedSet::arc(2.0, 1.5)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(hausdorff_measure(EmbeddedSet::flat_torus(1.0, 0.5)) == doctest::Approx(4 * pi * pi * 0.5).epsilon(1e-15));
  for (const auto& set : catalog()) {
    CHECK(set.measure() > 0.0);
    CHECK(std::isfinite(set.measure()));
  }
}

TEST_CASE("invalid set parameters are rejected") {
  CHECK_THROWS_AS(EmbeddedSet::circle(-1.0), Error);
  CHECK_THROWS_AS(EmbeddedSet::cube(1.0, 7), Error);
  // Overlapping components violate the positive-gap requirement.
  CHECK_THROWS_AS(EmbeddedSet::disjoint_union({{EmbeddedSet::circle(1.0), Point{0.0, 0.0}},
                                               {EmbeddedSet::circle(1.0), Point{0.5, 0.0}}}),
                  Error);
}

TEST_CASE("retraction") {
  const auto sphere = EmbeddedSet::sphere2(1.0);
  CHECK(sphere.retract(Point{2.0, 0.0, 0.0}) == Point{1.0, 0.0, 0.0});
  const auto line = EmbeddedSet::interval(1.0);
  CHECK(line.retract(Point{1.7}) == Point{1.0});
  CHECK(line.retract(Point{-0.2}) == Point{0.0});
  CHECK(line.retract(Point{0.25}) == Point{0.25});
  CHECK_THROWS_AS(sphere.retract(Point{0.0, 0.0, 0.0}), Error);
}

TEST_CASE("retract is idempotent and samples lie on the set") {
  Rng rng(7);
  for (const auto& set : catalog()) {
    CAPTURE(set.kind_name());
    for (int k = 0; k < 200; ++k) {
      const Point on = set.sample(rng);
      CHECK(set.distance_to(on) <= 1e-12 * set.diameter());
      CHECK(set.retract(on) == on);
      Point off = on;
      for (std::size_t i = 0; i < off.size(); ++i) off[i] += 0.3 * (uniform01(rng) - 0.5);
      const Point once = set.retract(off);
      CHECK(set.retract(once) == once);
      CHECK(set.distance_to(once) <= 1e-12 * set.diameter());
    }
  }
}

TEST_CASE("sampling is deterministic per seed") {
  const auto set = EmbeddedSet::sphere2(1.0);
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) CHECK(set.sample(a) == set.sample(b));
}

TEST_CASE("circle samples pass a chi-square uniformity test") {
  const auto set = EmbeddedSet::circle(1.0);
  Rng rng(2024);
  const int bins = 20, draws = 100000;
  std::vector<int> counts(bins, 0);
  for (int k = 0; k < draws; ++k) {
    const Point p = set.sample(rng);
    double theta = std::atan2(p[1], p[0]);
    if (theta < 0) theta += 2 * pi;
    ++counts[std::min(bins - 1, static_cast<int>(theta / (2 * pi) * bins))];
  }
  const double expected = static_cast<double>(draws) / bins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99th percentile of chi-square with 19 degrees of freedom.
  CHECK(chi2 < 36.191);
}

TEST_CASE("union sampling splits by component measure") {
  // Components of length 1 and 2.
  const auto set = EmbeddedSet::disjoint_union({{EmbeddedSet::interval(1.0), Point{0.0}},
                                                {EmbeddedSet::interval(2.0), Point{3.0}}});
  Rng rng(11);
  const int draws = 30000;
  int first = 0;
  for (int k = 0; k < draws; ++k) first += set.component_of(set.sample(rng)) == 0;
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  CHECK(std::fabs(static_cast<double>(first) / draws - p) < 3 * sigma);
}

TEST_CASE("points on different components respect the declared gap") {
  const auto set = EmbeddedSet::disjoint_union({{EmbeddedSet::circle(1.0), Point{0.0, 0.0}},
                                                {EmbeddedSet::circle(2.0), Point{5.0, 0.0}}});
  CHECK(set.component_gap() > 0.0);
  Rng rng(3);
  std::vector<Point> pts;
  for (int k = 0; k < 400; ++k) pts.push_back(set.sample(rng));
  for (const Point& p : pts)
    for (const Point& q : pts)
      if (set.component_of(p) != set.component_of(q)) CHECK(distance(p, q) >= set.component_gap());
}

TEST_CASE("partitions cover the set") {
  for (const auto& set : catalog()) {
    CAPTURE(set.kind_name());
    const auto part = RegionPartition::grid(set, {6});
    CHECK(part.total_measure() == doctest::Approx(set.measure()).epsilon(1e-12));
    Rng rng(5);
    std::vector<int> hits(part.size(), 0);
    for (int k = 0; k < 2000; ++k) {
      const Point p = set.sample(rng);
      const std::size_t r = part.locate(p);
      REQUIRE(r < part.size());
      CHECK(part[r].component == set.component_of(p));
      ++hits[r];
    }
  }
}

TEST_CASE("region integrals") {
  const auto circle = EmbeddedSet::circle(1.0);
  CHECK(integral(circle, [](const Point&) { return 1.0; }).value == doctest::Approx(2 * pi).epsilon(1e-12));
  const auto rho = [](const Point& p) { return (1.0 + 0.5 * p[0]) / (2 * pi); };
  CHECK(integral(circle, rho).value == doctest::Approx(1.0).epsilon(1e-12));

  const auto part = RegionPartition::grid(circle, {7});
  double total = 0.0;
  for (const Region& r : part.regions()) {
    const double v = region_integral(circle, [](const Point&) { return 3.0; }, r).value;
    CHECK(v == doctest::Approx(3.0 * r.measure).epsilon(1e-12));
    total += region_integral(circle, rho, r).value;
  }
  // Additivity over the partition.
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  // Surface integrals use Monte Carlo with a reported standard error.
  const auto sphere = EmbeddedSet::sphere2(1.0);
  const IntegralResult z2 = integral(sphere, [](const Point& p) { return p[2] * p[2]; });
  CHECK(z2.monte_carlo);
  CHECK(std::fabs(z2.value - 4 * pi / 3) < 5 * z2.error + 1e-12);
}

TEST_CASE("non-integrable integrands are reported") {
  const auto line = EmbeddedSet::interval(1.0);
  IntegrationOptions opts;
  opts.singular_points = {Point{0.0}};
  CHECK_THROWS_AS(integral(line, [](const Point& p) { return 1.0 / std::fabs(p[0]); }, opts), Error);
  const double v = integral(line, [](const Point& p) { return 1.0 / std::sqrt(std::fabs(p[0])); }, opts).value;
  CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
}
