#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "riesz/geometry.hpp"
#include "riesz/point.hpp"

namespace riesz {

/// Isolated zero of a weight at the diagonal point (a, a), of order t:
/// w(x, y) >= C |x - a|^t near a.
struct WeightZero {
  Point location;
  double order = 0.0;
};

/// Optional closed form w(x, y) = scale * F(phi(x), phi(y), |x - y|) with a
/// per-point scalar phi, so pair kernels evaluate phi once per point.
struct PairForm {
  enum class Kind { None, DensityProduct, PowerSum };
  Kind kind = Kind::None;
  std::function<double(const Point&)> phi;
  std::function<Point(const Point&)> grad_phi;  // empty when not differentiable
  double q = 0.0;  // DensityProduct: F = (phi_x phi_y + r)^(-q); PowerSum: F = phi_x + phi_y
  double scale = 1.0;
};

struct WeightMetadata {
  std::string kind = "custom";
  bool is_symmetric = false;
  bool is_unit = false;
  bool differentiable = false;
  std::vector<WeightZero> zeros;
  /// Lower bound for w on a neighbourhood of the diagonal (0 when unknown or
  /// when the weight has zeros).
  double diagonal_infimum_hint = 0.0;
  PairForm form;
};

/// A scalar field on A with an optional ambient gradient.
struct ScalarField {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;  // may be empty
};

/// Weight w(x, y) >= 0 on A x A. Evaluation rejects negative, NaN or
/// infinite values so that energies of distinct points stay finite.
class WeightFn {
 public:
  using Eval = std::function<double(const Point&, const Point&)>;
  /// Gradient of w(x, y) with respect to its first argument.
  using Grad = std::function<Point(const Point&, const Point&)>;

  WeightFn(Eval eval, Grad grad, WeightMetadata meta);

  double operator()(const Point& x, const Point& y) const;
  double eval(const Point& x, const Point& y) const { return (*this)(x, y); }
  double diag(const Point& x) const { return (*this)(x, x); }
  Point grad_first(const Point& x, const Point& y) const;

  bool is_unit() const { return meta_.is_unit; }
  const WeightMetadata& metadata() const { return meta_; }

  /// Evaluation without the validity check; for hot loops that validate in bulk.
  double raw(const Point& x, const Point& y) const { return eval_(x, y); }

 private:
  Eval eval_;
  Grad grad_;
  WeightMetadata meta_;
};

/// w(x, y) = 1.
WeightFn unit_weight();

/// Wraps an arbitrary (possibly asymmetric) weight; metadata marks it
/// non-symmetric unless told otherwise.
WeightFn custom_weight(WeightFn::Eval eval, WeightFn::Grad grad = {},
                       bool symmetric = false);

/// (w(x, y) + w(y, x)) / 2.
WeightFn symmetrize(const WeightFn& raw);

/// c * w for a constant c > 0.
WeightFn scale_weight(const WeightFn& w, double c);

/// w(x, y) = (rho(x) rho(y) + |x - y|)^(-s / 2d), whose diagonal is
/// rho(x)^(-s/d). Validates that rho integrates to 1 over `set` within 1e-4
/// (or five Monte Carlo standard errors on surfaces).
WeightFn density_weight(const ScalarField& rho, double s, int d, const EmbeddedSet& set);

/// w(x, y) = |x - a|^t + |y - a|^t, a zero of order t at (a, a).
WeightFn power_zero_weight(const Point& a, double t);

/// Built-in densities used by run configs.
/// "uniform": 1 / H_d(A) on any set.
/// "cosine":  (1 + amplitude * x0 / R) / (2 pi R) on a circle of radius R.
/// "zonal":   (1 + amplitude * x2 / R) / (4 pi R^2) on a sphere of radius R.
ScalarField named_density(const std::string& name, const EmbeddedSet& set, double amplitude);

/// Weighted Hausdorff measure H_d^{s,w}(B) = int_B w(x,x)^(-d/s) dH_d, per region
/// of a partition, plus its normalisation h_d^{s,w}.
struct WeightedMeasure {
  double total = 0.0;
  std::vector<double> region_values;
  std::vector<double> normalized;  // h_d^{s,w} per region, sums to 1
  double error = 0.0;              // accumulated integration error estimate
};

/// Density w(x,x)^(-d/s) of the weighted Hausdorff measure.
ScalarFn weighted_density(const WeightFn& w, double s, int d);

WeightedMeasure weighted_hausdorff(const EmbeddedSet& set, const WeightFn& w, double s, int d,
                                   const RegionPartition& partition);

/// H_d^{s,w}(A) alone.
double weighted_hausdorff_total(const EmbeddedSet& set, const WeightFn& w, double s, int d);

}  // namespace riesz
