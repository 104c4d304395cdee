#include "riesz/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "riesz/error.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

WeightFn::WeightFn(Eval eval, Grad grad, WeightMetadata meta)
    : eval_(std::move(eval)), grad_(std::move(grad)), meta_(std::move(meta)) {
  if (!eval_) throw Error(ErrorKind::InvalidArgument, "weight needs an evaluator");
  if (!grad_) meta_.differentiable = false;
}

double WeightFn::operator()(const Point& x, const Point& y) const {
  const double v = eval_(x, y);
  if (std::isnan(v) || v < 0.0)
    throw Error(ErrorKind::InvalidArgument, "weight returned a negative or NaN value");
  // +inf is tolerated on the diagonal only (a density vanishing at x).
  if (std::isinf(v) && !(x == y))
    throw Error(ErrorKind::InvalidArgument, "weight is infinite off the diagonal");
  return v;
}

Point WeightFn::grad_first(const Point& x, const Point& y) const {
  if (!meta_.differentiable || !grad_)
    throw Error(ErrorKind::NonDifferentiable, "weight '" + meta_.kind + "' has no gradient");
  return grad_(x, y);
}

WeightFn unit_weight() {
  WeightMetadata meta;
  meta.kind = "unit";
  meta.is_symmetric = true;
  meta.is_unit = true;
  meta.differentiable = true;
  meta.diagonal_infimum_hint = 1.0;
  return WeightFn([](const Point&, const Point&) { return 1.0; },
                  [](const Point& x, const Point&) { return Point(x.dim); }, std::move(meta));
}

WeightFn custom_weight(WeightFn::Eval eval, WeightFn::Grad grad, bool symmetric) {
  WeightMetadata meta;
  meta.kind = "custom";
  meta.is_symmetric = symmetric;
  meta.differentiable = static_cast<bool>(grad);
  return WeightFn(std::move(eval), std::move(grad), std::move(meta));
}

WeightFn symmetrize(const WeightFn& raw) {
  if (raw.metadata().is_symmetric) return raw;
  WeightMetadata meta = raw.metadata();
  meta.kind = "symmetrized(" + meta.kind + ")";
  meta.is_symmetric = true;
  meta.is_unit = false;
  meta.form = {};
  // The symmetrized gradient needs the partial in the second slot, which a
  // raw weight does not expose.
  meta.differentiable = false;
  return WeightFn(
      [raw](const Point& x, const Point& y) { return (raw(x, y) + raw(y, x)) * 0.5; }, {},
      std::move(meta));
}

WeightFn scale_weight(const WeightFn& w, double c) {
  if (!(std::isfinite(c) && c > 0.0))
    throw Error(ErrorKind::InvalidArgument, "weight scale must be positive and finite");
  WeightMetadata meta = w.metadata();
  meta.kind = "scaled(" + meta.kind + ")";
  meta.is_unit = meta.is_unit && c == 1.0;
  meta.diagonal_infimum_hint *= c;
  meta.form.scale *= c;
  WeightFn::Grad grad;
  if (meta.differentiable)
    grad = [w, c](const Point& x, const Point& y) { return w.grad_first(x, y) * c; };
  return WeightFn([w, c](const Point& x, const Point& y) { return c * w(x, y); }, std::move(grad),
                  std::move(meta));
}

WeightFn density_weight(const ScalarField& rho, double s, int d, const EmbeddedSet& set) {
  if (!(std::isfinite(s) && s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be at least 1");
  if (!rho.value) throw Error(ErrorKind::InvalidArgument, "density needs a value function");

  // Bounded and nonnegative on a deterministic sample.
  Rng rng(0xd3a5eULL);
  double rho_max = 0.0;
  for (int i = 0; i < 2048; ++i) {
    const double v = rho.value(set.sample(rng));
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorKind::InvalidArgument, "density must be finite and nonnegative");
    rho_max = std::max(rho_max, v);
  }
  // Surface integrals are Monte Carlo, so allow for their standard error.
  const IntegralResult mass_est = integral(set, rho.value);
  const double mass = mass_est.value;
  if (std::fabs(mass - 1.0) > std::max(1e-4, 5.0 * mass_est.error))
    throw Error(ErrorKind::InvalidArgument,
                "density must integrate to 1 over the set (got " + std::to_string(mass) + ")");

  const double q = s / (2.0 * d);
  WeightMetadata meta;
  meta.kind = "density(" + rho.name + ")";
  meta.is_symmetric = true;
  meta.differentiable = static_cast<bool>(rho.gradient);
  const double bound = 1.21 * rho_max * rho_max + set.diameter();
  meta.diagonal_infimum_hint = std::pow(bound, -q);

  auto f = rho.value;
  meta.form.kind = PairForm::Kind::DensityProduct;
  meta.form.phi = rho.value;
  meta.form.grad_phi = rho.gradient;
  meta.form.q = q;
  WeightFn::Grad grad;
  if (rho.gradient) {
    auto g = rho.gradient;
    grad = [f, g, q](const Point& x, const Point& y) {
      const double fx = f(x), fy = f(y);
      const double r = distance(x, y);
      const double base = fx * fy + r;
      Point dir = g(x) * fy;
      if (r > 0.0) dir += (x - y) * (1.0 / r);
      return dir * (-q * std::pow(base, -q - 1.0));
    };
  }
  return WeightFn(
      [f, q](const Point& x, const Point& y) { return std::pow(f(x) * f(y) + distance(x, y), -q); },
      std::move(grad), std::move(meta));
}

WeightFn power_zero_weight(const Point& a, double t) {
  if (!(std::isfinite(t) && t > 0.0))
    throw Error(ErrorKind::InvalidArgument, "zero order t must be positive");
  if (!a.is_finite()) throw Error(ErrorKind::InvalidArgument, "zero location must be finite");
  WeightMetadata meta;
  meta.kind = "power_zero";
  meta.is_symmetric = true;
  meta.differentiable = true;
  meta.zeros.push_back({a, t});
  meta.diagonal_infimum_hint = 0.0;
  meta.form.kind = PairForm::Kind::PowerSum;
  meta.form.phi = [a, t](const Point& x) { return std::pow(distance(x, a), t); };
  meta.form.grad_phi = [a, t](const Point& x) {
    const double r = distance(x, a);
    if (r == 0.0) return Point(x.dim);
    return (x - a) * (t * std::pow(r, t - 2.0));
  };
  return WeightFn(
      [a, t](const Point& x, const Point& y) {
        return std::pow(distance(x, a), t) + std::pow(distance(y, a), t);
      },
      [a, t](const Point& x, const Point&) {
        const double r = distance(x, a);
        if (r == 0.0) return Point(x.dim);
        return (x - a) * (t * std::pow(r, t - 2.0));
      },
      std::move(meta));
}

ScalarField named_density(const std::string& name, const EmbeddedSet& set, double amplitude) {
  ScalarField f;
  f.name = name;
  if (name == "uniform") {
    const double m = set.measure();
    f.value = [m](const Point&) { return 1.0 / m; };
    f.gradient = [](const Point& x) { return Point(x.dim); };
    return f;
  }
  if (std::fabs(amplitude) > 1.0)
    throw Error(ErrorKind::InvalidArgument, "density amplitude must lie in [-1, 1]");
  if (name == "cosine") {
    if (set.kind() != SetKind::Circle)
      throw Error(ErrorKind::UnsupportedKind, "the cosine density is defined on circles");
    const double r = set.diameter() / 2.0;
    const double c = 1.0 / (2.0 * kPi * r);
    f.value = [r, c, amplitude](const Point& x) { return c * (1.0 + amplitude * x[0] / r); };
    f.gradient = [r, c, amplitude](const Point&) { return Point{c * amplitude / r, 0.0}; };
    return f;
  }
  if (name == "zonal") {
    if (set.kind() != SetKind::Sphere2)
      throw Error(ErrorKind::UnsupportedKind, "the zonal density is defined on sphere2");
    const double r = set.diameter() / 2.0;
    const double c = 1.0 / (4.0 * kPi * r * r);
    f.value = [r, c, amplitude](const Point& x) { return c * (1.0 + amplitude * x[2] / r); };
    f.gradient = [r, c, amplitude](const Point&) { return Point{0.0, 0.0, c * amplitude / r}; };
    return f;
  }
  throw Error(ErrorKind::UnsupportedKind, "unknown density '" + name + "'");
}

ScalarFn weighted_density(const WeightFn& w, double s, int d) {
  const double e = -static_cast<double>(d) / s;
  return [w, e](const Point& x) { return std::pow(w.diag(x), e); };
}

namespace {

void check_integrable(const EmbeddedSet& set, const WeightFn& w, double s) {
  const double tol = 1e-9 * set.diameter();
  for (const WeightZero& z : w.metadata().zeros) {
    if (z.location.dim != set.ambient_dim() || set.distance_to(z.location) > tol) continue;
    // On a d-regular set the density behaves like |x - a|^(-t d / s), which is
    // integrable exactly when t < s.
    if (z.order >= s)
      throw Error(ErrorKind::Divergence,
                  "weight zero of order >= s makes the weighted Hausdorff measure infinite");
  }
}

}  // namespace

WeightedMeasure weighted_hausdorff(const EmbeddedSet& set, const WeightFn& w, double s, int d,
                                   const RegionPartition& partition) {
  if (!(s > 0.0) || d < 1) throw Error(ErrorKind::InvalidArgument, "need s > 0 and d >= 1");
  check_integrable(set, w, s);
  IntegrationOptions opts;
  for (const WeightZero& z : w.metadata().zeros) opts.singular_points.push_back(z.location);
  const ScalarFn density = weighted_density(w, s, d);

  WeightedMeasure out;
  CompensatedSum total;
  double var = 0.0;
  for (const Region& r : partition.regions()) {
    const IntegralResult part = region_integral(set, density, r, opts);
    out.region_values.push_back(part.value);
    total += part.value;
    if (part.monte_carlo)
      var += part.error * part.error;
    else
      out.error += part.error;
  }
  out.error += std::sqrt(var);
  out.total = total.value();
  if (!(out.total > 0.0) || !std::isfinite(out.total))
    throw Error(ErrorKind::Divergence, "weighted Hausdorff measure is not positive and finite");
  for (double v : out.region_values) out.normalized.push_back(v / out.total);
  return out;
}

double weighted_hausdorff_total(const EmbeddedSet& set, const WeightFn& w, double s, int d) {
  if (w.is_unit()) return set.measure();
  return weighted_hausdorff(set, w, s, d, RegionPartition::whole(set)).total;
}

}  // namespace riesz
