#include "riesz/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "riesz/error.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

void check_regime(double s, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be at least 1");
  if (!(std::isfinite(s) && s >= d))
    throw Error(ErrorKind::InvalidArgument, "need s >= d (the hypersingular regime)");
}

}  // namespace

double tau_real(double s, int d, double n) {
  check_regime(s, d);
  if (s == static_cast<double>(d)) return n * n * std::log(n);
  return std::pow(n, 1.0 + s / d);
}

double tau_eval(double s, int d, long long n) {
  check_regime(s, d);
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "N must be nonnegative");
  if (n <= 1) return 1.0;
  return tau_real(s, d, static_cast<double>(n));
}

double beta(int d) {
  if (d < 0) throw Error(ErrorKind::InvalidArgument, "dimension must be nonnegative");
  if (d == 0) return 1.0;
  const double h = 0.5 * d;
  return 2.0 * std::pow(kPi, h) / (d * std::tgamma(h));
}

double riemann_zeta(double s) {
  if (!(s > 1.0) || !std::isfinite(s))
    throw Error(ErrorKind::InvalidArgument, "riemann_zeta needs s > 1");
  // Euler-Maclaurin: direct terms below M, then the integral, half-term and
  // Bernoulli corrections of the tail.
  constexpr int kM = 16;
  constexpr std::array<double, 7> kB2k{1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30,
                                       5.0 / 66, -691.0 / 2730, 7.0 / 6};
  const double m = kM;
  CompensatedSum acc;
  double corr = 0.0;
  double rising = s;        // s (s+1) ... (s + 2k - 2)
  double fact = 2.0;        // (2k)!
  double power = std::pow(m, -s - 1.0);
  for (std::size_t k = 0; k < kB2k.size(); ++k) {
    corr += kB2k[k] / fact * rising * power;
    rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
    fact *= (2.0 * k + 3.0) * (2.0 * k + 4.0);
    power /= m * m;
  }
  acc += corr;
  acc += 0.5 * std::pow(m, -s);
  acc += std::pow(m, 1.0 - s) / (s - 1.0);
  for (int n = kM - 1; n >= 1; --n) acc += std::pow(static_cast<double>(n), -s);
  return acc.value();
}

namespace {

// |m e1 + n e2|^2 for e1 = (1, 0), e2 = (1/2, sqrt(3)/2).
double lattice_norm2(long long m, long long n) {
  return static_cast<double>(m * m + m * n + n * n);
}

// Sum over hexagonal shells 1..shells of every lattice point, visiting all six
// rotations of the sector {m >= 1, n >= 0} explicitly.
double hex_shell_sum(double s, int shells) {
  CompensatedSum acc;
  const double e = -0.5 * s;
  for (long long k = 1; k <= shells; ++k) {
    for (long long j = 0; j < k; ++j) {
      long long m = k - j, n = j;
      for (int r = 0; r < 6; ++r) {
        acc += std::pow(lattice_norm2(m, n), e);
        // 60-degree rotation: (m, n) -> (-n, m + n).
        const long long nm = -n, nn = m + n;
        m = nm;
        n = nn;
      }
    }
  }
  return acc.value();
}

// Continuum estimate of the shells beyond `shells`: lattice density 2/sqrt(3)
// integrated outside the hexagon of hex-radius shells + 1/2.
double hex_tail_estimate(double s, int shells) {
  const double rho = shells + 0.5;
  const double apothem = rho * kSqrt3 / 2.0;
  const double angular = boost::math::quadrature::gauss<double, 30>::integrate(
      [s](double phi) { return std::pow(std::cos(phi), s - 2.0); }, 0.0, kPi / 6.0);
  return 12.0 * (2.0 / kSqrt3) * std::pow(apothem, 2.0 - s) / (s - 2.0) * angular;
}

double hex_tail_bound(double s, int shells) {
  return 6.0 * std::pow(2.0 / kSqrt3, s) * std::pow(static_cast<double>(shells), 2.0 - s) /
         (s - 2.0);
}

}  // namespace

double lattice_zeta_triangular_sector(double s, int shells) {
  if (!(s > 2.0)) throw Error(ErrorKind::InvalidArgument, "lattice zeta diverges for s <= 2");
  CompensatedSum acc;
  for (long long k = 1; k <= shells; ++k)
    for (long long j = 0; j < k; ++j) acc += std::pow(lattice_norm2(k - j, j), -0.5 * s);
  return acc.value();
}

LatticeZeta lattice_zeta_triangular_detail(double s, int shells) {
  if (!(s > 2.0) || !std::isfinite(s))
    throw Error(ErrorKind::InvalidArgument, "lattice zeta diverges for s <= 2");
  auto at = [s](int r) {
    LatticeZeta z;
    z.shells = r;
    z.tail = hex_tail_estimate(s, r);
    z.tail_bound = hex_tail_bound(s, r);
    z.value = hex_shell_sum(s, r) + z.tail;
    return z;
  };
  if (shells > 0) return at(shells);

  constexpr int kMaxShells = 4096;
  LatticeZeta coarse = at(32);
  for (int r = 64; r <= kMaxShells; r *= 2) {
    LatticeZeta fine = at(r);
    if (std::fabs(fine.value - coarse.value) <= 1e-10 * fine.value) return fine;
    coarse = fine;
  }
  return coarse;
}

double lattice_zeta_triangular(double s) { return lattice_zeta_triangular_detail(s).value; }

const char* to_string(ConstantStatus status) {
  switch (status) {
    case ConstantStatus::Exact: return "exact";
    case ConstantStatus::ConjecturedUpperBound: return "conjectured";
    case ConstantStatus::Unknown: return "unknown";
  }
  return "unknown";
}

KnownConstant known_constant(double s, int d) {
  if (d < 1 || !(s > d)) throw Error(ErrorKind::InvalidArgument, "C_{s,d} is defined for s > d");
  KnownConstant c;
  if (d == 1) {
    c.status = ConstantStatus::Exact;
    c.value = 2.0 * riemann_zeta(s);
    c.formula = "2*zeta(s)";
  } else if (d == 2) {
    c.status = ConstantStatus::ConjecturedUpperBound;
    c.value = std::pow(kSqrt3 / 2.0, s / 2.0) * lattice_zeta_triangular(s);
    c.formula = "(sqrt(3)/2)^(s/2)*zeta_L(s)";
  } else {
    c.status = ConstantStatus::Unknown;
    c.formula = "unknown";
  }
  return c;
}

double theoretical_g_from_measure(double weighted_measure, double s, int d,
                                  std::optional<double> c_value) {
  check_regime(s, d);
  if (weighted_measure == 0.0) return std::numeric_limits<double>::infinity();
  if (!(weighted_measure > 0.0))
    throw Error(ErrorKind::InvalidArgument, "weighted measure must be nonnegative");
  if (s == static_cast<double>(d)) return beta(d) / weighted_measure;
  if (!c_value) throw Error(ErrorKind::InvalidArgument, "s > d needs a value for C_{s,d}");
  return *c_value / std::pow(weighted_measure, s / d);
}

double theoretical_g(const EmbeddedSet& set, const WeightFn& w, double s, int d,
                     std::optional<double> c_value) {
  check_regime(s, d);
  return theoretical_g_from_measure(weighted_hausdorff_total(set, w, s, d), s, d, c_value);
}

namespace {

struct LinearFit {
  double g = 0.0;
  double b = 0.0;  // g * a
  double sse = 0.0;
  bool singular = false;
};

// Weighted least squares of y ~ g + b x with weights 1 / y^2 (relative residuals).
LinearFit solve_linear(std::span<const double> x, std::span<const double> y) {
  double s00 = 0, s01 = 0, s11 = 0, t0 = 0, t1 = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double wk = 1.0 / (y[k] * y[k]);
    s00 += wk;
    s01 += wk * x[k];
    s11 += wk * x[k] * x[k];
    t0 += wk * y[k];
    t1 += wk * x[k] * y[k];
  }
  LinearFit f;
  const double det = s00 * s11 - s01 * s01;
  if (!(std::fabs(det) > 1e-13 * (s00 * s11))) {
    f.singular = true;
    return f;
  }
  f.g = (t0 * s11 - t1 * s01) / det;
  f.b = (s00 * t1 - s01 * t0) / det;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = (f.g + f.b * x[k] - y[k]) / y[k];
    f.sse += r * r;
  }
  return f;
}

}  // namespace

ScalingFit fit_g(std::span<const std::pair<long long, double>> pairs, double s, int d,
                 std::optional<double> weighted_measure) {
  check_regime(s, d);
  if (pairs.size() < 4) throw Error(ErrorKind::InvalidArgument, "fit_g needs at least 4 (N, E) pairs");
  std::vector<double> n, y;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [nk, ek] = pairs[k];
    if (nk < 2) throw Error(ErrorKind::InvalidArgument, "fit_g needs N >= 2");
    if (k > 0 && nk <= pairs[k - 1].first)
      throw Error(ErrorKind::InvalidArgument, "fit_g needs increasing N");
    if (!(ek > 0.0) || !std::isfinite(ek))
      throw Error(ErrorKind::InvalidArgument, "fit_g needs positive finite energies");
    n.push_back(static_cast<double>(nk));
    y.push_back(ek / tau_eval(s, d, nk));
  }

  constexpr double kPMin = 0.25, kPMax = 2.0;
  std::vector<double> x(n.size());
  auto profile = [&](double p) {
    for (std::size_t k = 0; k < n.size(); ++k) x[k] = std::pow(n[k], -p);
    return solve_linear(x, y);
  };
  auto objective = [&](double p) {
    const LinearFit f = profile(p);
    return f.singular ? std::numeric_limits<double>::infinity() : f.sse;
  };

  double best_p = kPMin;
  double best_sse = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 176;
  for (int i = 0; i < kGrid; ++i) {
    const double p = kPMin + (kPMax - kPMin) * i / (kGrid - 1);
    const double v = objective(p);
    if (v < best_sse) {
      best_sse = v;
      best_p = p;
    }
  }

  ScalingFit fit;
  fit.n_min = pairs.front().first;
  fit.n_max = pairs.back().first;
  if (std::isfinite(best_sse)) {
    const double step = (kPMax - kPMin) / (kGrid - 1);
    const double lo = std::max(kPMin, best_p - step);
    const double hi = std::min(kPMax, best_p + step);
    const auto [p_opt, sse_opt] = boost::math::tools::brent_find_minima(
        objective, lo, hi, std::numeric_limits<double>::digits);
    const double p = sse_opt <= best_sse ? p_opt : best_p;
    const LinearFit f = profile(p);
    fit.g_hat = f.g;
    fit.a = f.b / f.g;
    fit.p = p;
    fit.residual_norm = std::sqrt(f.sse / static_cast<double>(n.size()));
  }
  if (!std::isfinite(best_sse) || !(fit.g_hat > 0.0)) {
    // Two-point Richardson extrapolation with a 1/N correction.
    const std::size_t k1 = n.size() - 2, k2 = n.size() - 1;
    fit.richardson_fallback = true;
    fit.p = 1.0;
    fit.g_hat = (y[k2] * n[k2] - y[k1] * n[k1]) / (n[k2] - n[k1]);
    fit.a = (y[k1] / fit.g_hat - 1.0) * n[k1];
    double sse = 0.0;
    for (std::size_t k = 0; k < n.size(); ++k) {
      const double r = (fit.g_hat * (1.0 + fit.a / n[k]) - y[k]) / y[k];
      sse += r * r;
    }
    fit.residual_norm = std::sqrt(sse / static_cast<double>(n.size()));
  }

  fit.c_hat = std::numeric_limits<double>::quiet_NaN();
  if (weighted_measure) {
    fit.c_hat = s == static_cast<double>(d) ? fit.g_hat * *weighted_measure
                                            : fit.g_hat * std::pow(*weighted_measure, s / d);
  }
  return fit;
}

}  // namespace riesz
