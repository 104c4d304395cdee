#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riesz/geometry.hpp"
#include "riesz/weights.hpp"

namespace riesz {

/// Energy normaliser: N^{1+s/d} for s > d, N^2 ln N for s = d, and 1 for N in {0, 1}.
double tau_eval(double s, int d, long long n);
/// Same formula at a real argument (no special case below 2).
double tau_real(double s, int d, double n);

/// Volume of the d-dimensional unit ball, with beta(0) = 1.
double beta(int d);

/// Riemann zeta for s > 1, relative accuracy ~1e-15.
double riemann_zeta(double s);

struct LatticeZeta {
  double value = 0.0;
  int shells = 0;          // hexagonal shells summed exactly
  double tail = 0.0;       // continuum estimate added for the remaining shells
  double tail_bound = 0.0; // rigorous upper bound on the omitted shells
};

/// Epstein zeta of the triangular lattice m(1,0) + n(1/2, sqrt(3)/2), s > 2.
/// `shells` = 0 picks the truncation adaptively for relative accuracy 1e-8.
LatticeZeta lattice_zeta_triangular_detail(double s, int shells = 0);
double lattice_zeta_triangular(double s);
/// Sum over one of the six 60-degree sectors (the full sum is six times this).
double lattice_zeta_triangular_sector(double s, int shells);

enum class ConstantStatus { Exact, ConjecturedUpperBound, Unknown };
const char* to_string(ConstantStatus status);

struct KnownConstant {
  ConstantStatus status = ConstantStatus::Unknown;
  std::optional<double> value;  // exact value, or the conjectured value (= bound)
  std::string formula;
};

/// C_{s,d}: exactly 2 zeta(s) for d = 1, the bound (sqrt(3)/2)^{s/2} zeta_L(s)
/// for d = 2 (conjectured to be equality), unknown otherwise.
KnownConstant known_constant(double s, int d);

/// Limit of E / tau_{s,d}(N): C / H_d^{s,w}(A)^{s/d} for s > d, and
/// beta_d / H_d^{d,w}(A) for s = d. Infinite when the measure vanishes.
double theoretical_g(const EmbeddedSet& set, const WeightFn& w, double s, int d,
                     std::optional<double> c_value);
/// Same, from a precomputed H_d^{s,w}(A).
double theoretical_g_from_measure(double weighted_measure, double s, int d,
                                  std::optional<double> c_value);

struct ScalingFit {
  double g_hat = 0.0;
  double a = 0.0;
  double p = 1.0;
  double residual_norm = 0.0;  // RMS relative residual of E / tau
  long long n_min = 0;
  long long n_max = 0;
  bool richardson_fallback = false;
  /// C estimate g_hat * H^{s/d} (s > d) or g_hat * H (s = d); NaN without a measure.
  double c_hat = 0.0;
};

/// Least-squares fit of E / tau_{s,d}(N) = g (1 + a N^{-p}) with p in [0.25, 2].
ScalingFit fit_g(std::span<const std::pair<long long, double>> pairs, double s, int d,
                 std::optional<double> weighted_measure = std::nullopt);

}  // namespace riesz
