#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/trigamma.hpp>

#include "riesz/asymptotics.hpp"
#include "riesz/error.hpp"

using namespace riesz;
using std::numbers::pi;

namespace {

// Partial sum plus the first Euler-Maclaurin corrections.
double zeta_oracle(double s) {
  const int m = 20000;
  long double sum = 0.0L;
  for (int n = m - 1; n >= 1; --n) sum += std::pow(static_cast<long double>(n), -static_cast<long double>(s));
  const long double M = m;
  sum += std::pow(M, 1 - s) / (s - 1) + 0.5L * std::pow(M, -s) + s / 12.0L * std::pow(M, -s - 1);
  return static_cast<double>(sum);
}

// Direct sum over the hexagon max(|m|, |n|, |m + n|) <= radius.
double hexagon_sum(double s, int radius) {
  long double sum = 0.0L;
  for (int m = -radius; m <= radius; ++m)
    for (int n = -radius; n <= radius; ++n) {
      if ((m == 0 && n == 0) || std::abs(m + n) > radius) continue;
      const long double q = static_cast<long double>(m) * m + static_cast<long double>(m) * n + static_cast<long double>(n) * n;
      sum += std::pow(q, -static_cast<long double>(s) / 2);
    }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("normaliser tau") {
  CHECK(tau_eval(2.0, 1, 10) == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(tau_eval(1.0, 1, 1) == 1.0);
  CHECK(tau_eval(2.0, 2, 0) == 1.0);
  const double e2 = std::exp(2.0);
  CHECK(tau_real(1.0, 1, e2) == doctest::Approx(2 * e2 * e2).epsilon(1e-14));
  for (auto [s, d] : {std::pair{2.0, 1}, {1.0, 1}, {4.0, 2}, {2.0, 2}}) {
    double prev = tau_eval(s, d, 2);
    for (long long n = 3; n < 2000; ++n) {
      const double t = tau_eval(s, d, n);
      CHECK(t > prev);
      prev = t;
    }
  }
}

TEST_CASE("unit ball volumes") {
  CHECK(beta(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(beta(2) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(beta(3) == doctest::Approx(4 * pi / 3).epsilon(1e-15));
  CHECK(beta(4) == doctest::Approx(pi * pi / 2).epsilon(1e-15));
}

TEST_CASE("riemann zeta") {
  CHECK(zeta_oracle(2.0) == doctest::Approx(pi * pi / 6).epsilon(1e-13));
  CHECK(riemann_zeta(2.0) == doctest::Approx(pi * pi / 6).epsilon(1e-15));
  CHECK(riemann_zeta(4.0) == doctest::Approx(std::pow(pi, 4) / 90).epsilon(1e-15));
  for (double s : {1.5, 3.0, 5.5}) CHECK(riemann_zeta(s) == doctest::Approx(zeta_oracle(s)).epsilon(1e-11));
  CHECK(riemann_zeta(30.0) - 1.0 < 1e-9);
  CHECK(riemann_zeta(30.0) > 1.0);
  CHECK_THROWS_AS(riemann_zeta(1.0), Error);
}

TEST_CASE("triangular lattice zeta") {
  // zeta_L(4) = 6 zeta(2) L(2, chi_-3), with L(2, chi_-3) = (psi'(1/3) - psi'(2/3)) / 9.
  const double l = (boost::math::trigamma(1.0 / 3) - boost::math::trigamma(2.0 / 3)) / 9;
  const double exact4 = 6 * (pi * pi / 6) * l;
  CHECK(lattice_zeta_triangular(4.0) == doctest::Approx(exact4).epsilon(1e-10));
  CHECK(0.75 * exact4 == doctest::Approx(5.78335929967867199).epsilon(1e-15));

  // zeta_L(6) = 6 zeta(3) L(3, chi_-3), with L(3, chi_-3) = 4 pi^3 / (81 sqrt(3)).
  const double exact6 = 6 * 1.2020569031595942854 * 4 * std::pow(pi, 3) / (81 * std::sqrt(3.0));
  CHECK(lattice_zeta_triangular(6.0) == doctest::Approx(exact6).epsilon(1e-10));

  // Truncation consistency at two radii.
  const auto r200 = lattice_zeta_triangular_detail(4.0, 200), r400 = lattice_zeta_triangular_detail(4.0, 400);
  CHECK(r200.value == doctest::Approx(r400.value).epsilon(1e-8));
  const auto r150 = lattice_zeta_triangular_detail(4.0, 150);
  CHECK(hexagon_sum(4.0, 150) == doctest::Approx(r150.value - r150.tail).epsilon(1e-12));

  const double z40 = lattice_zeta_triangular(40.0);
  CHECK(z40 > 6.0);
  CHECK(z40 < 6.001);
  for (double s : {3.0, 4.0, 7.5}) {
    const auto det = lattice_zeta_triangular_detail(s, 60);
    CHECK(6 * lattice_zeta_triangular_sector(s, 60) == doctest::Approx(det.value - det.tail).epsilon(1e-12));
    CHECK(det.tail <= det.tail_bound);
  }
  CHECK_THROWS_AS(lattice_zeta_triangular(2.0), Error);
}

TEST_CASE("known constants") {
  const auto c21 = known_constant(2.0, 1);
  CHECK(c21.status == ConstantStatus::Exact);
  CHECK(*c21.value == doctest::Approx(pi * pi / 3).epsilon(1e-15));
  const auto c42 = known_constant(4.0, 2);
  CHECK(c42.status == ConstantStatus::ConjecturedUpperBound);
  CHECK(*c42.value == doctest::Approx(0.75 * lattice_zeta_triangular(4.0)).epsilon(1e-15));
  const auto c43 = known_constant(4.0, 3);
  CHECK(c43.status == ConstantStatus::Unknown);
  CHECK_FALSE(c43.value.has_value());
  CHECK(std::string(to_string(ConstantStatus::Exact)) == "exact");
  CHECK(std::string(to_string(ConstantStatus::ConjecturedUpperBound)) == "conjectured");
  CHECK(std::string(to_string(ConstantStatus::Unknown)) == "unknown");
  CHECK_THROWS_AS(known_constant(1.0, 1), Error);

  for (double s : {3.0, 4.0, 8.0, 16.0}) {
    const double bound = *known_constant(s, 2).value;
    const double lhs = std::pow(bound, 2 / s);
    const double rhs = std::sqrt(3.0) / 2 * std::pow(lattice_zeta_triangular(s), 2 / s);
    CHECK(std::fabs(lhs / rhs - 1) < 1e-12);
  }
}

TEST_CASE("theoretical limits") {
  const auto circle = EmbeddedSet::circle(1.0);
  CHECK(theoretical_g(circle, unit_weight(), 2.0, 1, 2 * riemann_zeta(2.0)) ==
        doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(theoretical_g(circle, unit_weight(), 1.0, 1, std::nullopt) == doctest::Approx(1 / pi).epsilon(1e-14));
  const auto sphere = EmbeddedSet::sphere2(1.0);
  const double g = theoretical_g(sphere, unit_weight(), 3.0, 2, 1.7);
  CHECK(g * std::pow(4 * pi, 1.5) == doctest::Approx(1.7).epsilon(1e-13));
  CHECK(std::isinf(theoretical_g_from_measure(0.0, 2.0, 1, 1.0)));

  // Scaling the weight by c scales g by c.
  const auto w = power_zero_weight(Point{0.0, 0.0}, 2.0);
  const double g1 = theoretical_g(circle, w, 3.0, 1, 1.0);
  const double g3 = theoretical_g(circle, scale_weight(w, 3.0), 3.0, 1, 1.0);
  CHECK(g3 / g1 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("scaling fit") {
  std::vector<std::pair<long long, double>> exact;
  for (long long n : {16, 32, 64, 128}) exact.emplace_back(n, 7.0 * tau_eval(2.0, 1, n));
  CHECK(fit_g(exact, 2.0, 1).g_hat == doctest::Approx(7.0).epsilon(1e-10));

  std::vector<std::pair<long long, double>> corrected;
  for (long long n = 64; n <= 4096; n *= 2) corrected.emplace_back(n, tau_eval(3.0, 1, n) * (3.0 + 5.0 / n));
  CHECK(fit_g(corrected, 3.0, 1).g_hat == doctest::Approx(3.0).epsilon(1e-6));

  std::vector<std::pair<long long, double>> circle;
  for (long long n : {64, 128, 256, 512}) circle.emplace_back(n, n * (static_cast<double>(n) * n - 1) / 12);
  const ScalingFit fit = fit_g(circle, 2.0, 1, 2 * pi);
  CHECK(fit.g_hat == doctest::Approx(1.0 / 12).epsilon(1e-3));
  CHECK(fit.c_hat == doctest::Approx(fit.g_hat * std::pow(2 * pi, 2.0)).epsilon(1e-12));
  CHECK(fit.g_hat > 0.0);
  CHECK(fit.residual_norm >= 0.0);
  CHECK(fit.n_min == 64);
  CHECK(fit.n_max == 512);
}

TEST_CASE("fit round trip") {
  for (auto [g, a, p] : {std::tuple{0.37, 2.5, 0.8}, {5.0, -0.7, 1.3}, {1.2, 4.0, 0.4}}) {
    std::vector<std::pair<long long, double>> data;
    for (long long n : {20, 40, 80, 160, 320, 640}) data.emplace_back(n, tau_eval(4.0, 2, n) * g * (1 + a * std::pow(n, -p)));
    const ScalingFit fit = fit_g(data, 4.0, 2);
    CHECK(fit.g_hat == doctest::Approx(g).epsilon(1e-6));
    CHECK(fit.a == doctest::Approx(a).epsilon(1e-6));
    CHECK(fit.p == doctest::Approx(p).epsilon(1e-6));
  }
}
