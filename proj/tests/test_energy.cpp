#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "riesz/energy.hpp"
#include "riesz/error.hpp"

using namespace riesz;
using std::numbers::pi;

namespace {

std::shared_ptr<const EmbeddedSet> circle() { return std::make_shared<const EmbeddedSet>(EmbeddedSet::circle(1.0)); }

std::vector<Point> equally_spaced(int n, double phase = 0.0) {
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    const double t = phase + 2 * pi * k / n;
    pts.push_back(Point{std::cos(t), std::sin(t)});
  }
  return pts;
}

// Plain double loop over ordered pairs, long double accumulator.
long double brute_energy(const std::vector<Point>& pts, double s, const WeightFn& w) {
  long double e = 0.0L;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) e += static_cast<long double>(w(pts[i], pts[j])) * std::pow(static_cast<long double>(distance(pts[i], pts[j])), -static_cast<long double>(s));
  return e;
}

std::vector<Point> random_on(const EmbeddedSet& set, int n, Rng& rng) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(set.sample(rng));
  return pts;
}

}  // namespace

TEST_CASE("small closed-form energies") {
  const auto line = std::make_shared<const EmbeddedSet>(EmbeddedSet::interval(1.0));
  const Configuration two(line, {Point{0.2}, Point{0.7}});
  CHECK(energy(two, 3.0, unit_weight()).total == doctest::Approx(2.0 / std::pow(0.5, 3.0)).epsilon(1e-15));

  const Configuration tri(circle(), equally_spaced(3));
  CHECK(energy(tri, 2.0, unit_weight()).total == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("equally spaced circle energy matches the cosecant identity") {
  for (int n : {2, 5, 16, 33, 64, 100}) {
    CAPTURE(n);
    const auto pts = equally_spaced(n, 0.1);
    const double e = energy(Configuration(circle(), pts), 2.0, unit_weight()).total;
    const double closed = n * (static_cast<double>(n) * n - 1.0) / 12.0;
    CHECK(e == doctest::Approx(closed).epsilon(1e-13));
    if (n <= 64) CHECK(static_cast<double>(brute_energy(pts, 2.0, unit_weight())) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("energy agrees with a brute-force pair sum for weighted cases") {
  Rng rng(12);
  const auto c = circle();
  const auto sphere = EmbeddedSet::sphere2(1.0);
  const auto w_zero = power_zero_weight(Point{1.0, 0.0}, 1.0);
  const auto w_dens = density_weight(named_density("cosine", *c, 0.5), 2.0, 1, *c);
  const auto w_custom = custom_weight([](const Point& x, const Point& y) { return 1.0 + x[0] * x[0] + 0.5 * y[1]; });
  for (const WeightFn* w : {&w_zero, &w_dens, &w_custom}) {
    const auto pts = random_on(*c, 30, rng);
    CHECK(energy(Configuration(c, pts), 2.5, *w).total ==
          doctest::Approx(static_cast<double>(brute_energy(pts, 2.5, *w))).epsilon(1e-13));
  }
  const auto spts = random_on(sphere, 40, rng);
  const auto sp = std::make_shared<const EmbeddedSet>(sphere);
  CHECK(energy(Configuration(sp, spts), 4.0, unit_weight(), 3).total ==
        doctest::Approx(static_cast<double>(brute_energy(spts, 4.0, unit_weight()))).epsilon(1e-13));
}

TEST_CASE("energy report invariants") {
  Rng rng(1);
  const auto c = circle();
  const auto w = density_weight(named_density("cosine", *c, 0.5), 2.0, 1, *c);
  const Configuration cfg(c, random_on(*c, 80, rng));
  const EnergyReport r = energy(cfg, 2.0, w);
  double sum = 0.0;
  for (double u : r.per_point) sum += u;
  CHECK(sum == doctest::Approx(r.total).epsilon(1e-12));
  CHECK(r.total >= 0.0);
  CHECK(r.min_pair_distance <= r.max_pair_distance);

  // Nearest-neighbour lower bound.
  double lower = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    std::size_t nn = i == 0 ? 1 : 0;
    for (std::size_t j = 0; j < cfg.size(); ++j)
      if (j != i && distance(cfg[i], cfg[j]) < distance(cfg[i], cfg[nn])) nn = j;
    lower += w(cfg[i], cfg[nn]) / std::pow(distance(cfg[i], cfg[nn]), 2.0);
  }
  CHECK(r.total >= lower);
}

TEST_CASE("energy invariances") {
  Rng rng(21);
  const auto sphere = std::make_shared<const EmbeddedSet>(EmbeddedSet::sphere2(1.0));
  const auto pts = random_on(*sphere, 50, rng);
  const double s = 3.0;
  const double e = energy(Configuration(sphere, pts), s, unit_weight()).total;

  auto shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(energy(Configuration(sphere, shuffled), s, unit_weight()).total == doctest::Approx(e).epsilon(1e-12));

  // Rotation about an oblique axis, then a reflection.
  const double a = 0.6, ca = std::cos(a), sa = std::sin(a);
  std::vector<Point> moved;
  for (const Point& p : pts) {
    const Point q{ca * p[0] - sa * p[1], sa * p[0] + ca * p[1], p[2]};
    moved.push_back(Point{q[0], q[2], -q[1]});
  }
  CHECK(try_energy_total(moved, s, unit_weight(), {}).value() == doctest::Approx(e).epsilon(1e-12));

  // Homogeneity off the set, through the raw kernel.
  const double g = 0.37;
  std::vector<Point> scaled;
  for (const Point& p : pts) scaled.push_back(p * g);
  CHECK(try_energy_total(scaled, s, unit_weight(), {}).value() == doctest::Approx(std::pow(g, -s) * e).epsilon(1e-12));
}

TEST_CASE("asymmetric weights give the energy of their symmetrization") {
  Rng rng(8);
  const auto c = circle();
  const auto raw = custom_weight([](const Point& x, const Point& y) { return 2.0 + x[0] + 0.25 * y[1] * y[1]; });
  const auto pts = random_on(*c, 60, rng);
  const Configuration cfg(c, pts);
  CHECK(energy(cfg, 2.0, raw).total == energy(cfg, 2.0, symmetrize(raw)).total);
}

TEST_CASE("energy does not depend on the worker count") {
  Rng rng(31);
  const auto torus = std::make_shared<const EmbeddedSet>(EmbeddedSet::flat_torus(1.0, 0.5));
  const Configuration cfg(torus, random_on(*torus, 200, rng));
  const double e1 = energy(cfg, 4.0, unit_weight(), 1).total;
  for (unsigned w : {2u, 3u, 8u}) CHECK(energy(cfg, 4.0, unit_weight(), w).total == e1);
  const auto g1 = gradient(cfg, 4.0, unit_weight(), 3);
  const auto g2 = gradient(cfg, 4.0, unit_weight(), 3);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g2[i]);
}

TEST_CASE("coincident points are an error") {
  const auto c = circle();
  const Configuration cfg(c, {Point{1.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}});
  CHECK_THROWS_AS(energy(cfg, 2.0, unit_weight()), Error);
  CHECK_THROWS_AS(Configuration(c, {Point{2.0, 0.0}}), Error);
}

TEST_CASE("gradient symmetry cases") {
  const auto sphere = std::make_shared<const EmbeddedSet>(EmbeddedSet::sphere2(1.0));
  const Configuration pair(sphere, {Point{0.0, 0.0, 1.0}, Point{0.0, 0.0, -1.0}});
  for (const Point& g : gradient(pair, 2.0, unit_weight())) {
    CHECK(std::fabs(g[0]) < 1e-15);
    CHECK(std::fabs(g[1]) < 1e-15);
  }
  const auto pts = equally_spaced(4, 0.3);
  const auto g = gradient(Configuration(circle(), pts), 2.0, unit_weight());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point tangent{-pts[i][1], pts[i][0]};
    CHECK(std::fabs(dot(g[i], tangent)) < 1e-10);
  }
}

TEST_CASE("gradient matches central differences") {
  Rng rng(77);
  struct Case {
    EmbeddedSet set;
    double s;
    WeightFn w;
  };
  const auto c = EmbeddedSet::circle(1.0);
  const auto sph = EmbeddedSet::sphere2(1.0);
  const std::vector<Case> cases{
      {c, 2.0, unit_weight()},
      {EmbeddedSet::interval(1.0), 1.5, unit_weight()},
      {EmbeddedSet::flat_torus(1.0, 0.5), 3.0, unit_weight()},
      {c, 2.0, density_weight(named_density("cosine", c, 0.5), 2.0, 1, c)},
      {sph, 3.0, density_weight(named_density("zonal", sph, 0.3), 3.0, 2, sph)},
      {c, 2.0, power_zero_weight(Point{1.0, 0.0}, 1.5)},
      {c, 2.0, custom_weight([](const Point& x, const Point& y) { return 1.0 + x[0] * x[0] + y[0] * y[0]; },
                             [](const Point& x, const Point&) { return Point{2.0 * x[0], 0.0}; }, true)},
  };
  for (const Case& k : cases) {
    CAPTURE(k.w.metadata().kind);
    const auto pts = random_on(k.set, 10, rng);
    const auto g = energy_gradient(pts, k.s, k.w, {});
    const double h = 1e-6 * k.set.diameter();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t a = 0; a < pts[i].size(); ++a) {
        auto q = pts;
        q[i][a] += h;
        const double ep = try_energy_total(q, k.s, k.w, {}).value();
        q[i][a] -= 2 * h;
        const double em = try_energy_total(q, k.s, k.w, {}).value();
        const double fd = (ep - em) / (2 * h);
        CHECK(std::fabs(fd - g[i][a]) <= 1e-5 * std::max(1.0, std::fabs(g[i][a])));
      }
  }
}

TEST_CASE("scaled energy of a sink weight") {
  Rng rng(2);
  const auto sphere = std::make_shared<const EmbeddedSet>(EmbeddedSet::sphere2(1.0));
  const Configuration cfg(sphere, random_on(*sphere, 30, rng));
  const auto w4 = power_zero_weight(Point{0.0, 0.0, 0.0}, 4.0);
  const double e = energy(cfg, 2.0, w4).total;
  CHECK(scaled_energy(cfg, 1.0, 2.0, w4) == doctest::Approx(e).epsilon(1e-15));
  CHECK(scaled_energy(cfg, 0.5, 2.0, w4) / e == doctest::Approx(0.25).epsilon(1e-12));
  const auto w2 = power_zero_weight(Point{0.0, 0.0, 0.0}, 2.0);
  CHECK(scaled_energy(cfg, 0.3, 2.0, w2) == doctest::Approx(energy(cfg, 2.0, w2).total).epsilon(1e-12));
}
