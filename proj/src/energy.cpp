#include "riesz/energy.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "riesz/error.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace {

// Runs f(i) for every row i. Rows are dealt round-robin to workers; callers
// store per-row results and reduce them in index order afterwards, so the
// outcome is the same for any worker count.
template <class F>
void for_each_row(std::size_t n, unsigned workers, F&& f) {
  if (workers <= 1 || n < 128) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::exception_ptr> errors(used);
  {
    std::vector<std::jthread> threads;
    threads.reserve(used);
    for (unsigned t = 0; t < used; ++t) {
      threads.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += used) f(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_weight_value(double v) {
  if (!(v >= 0.0) || std::isinf(v))
    throw Error(ErrorKind::InvalidArgument, "weight must be finite and nonnegative off the diagonal");
}

}  // namespace

Configuration::Configuration(std::shared_ptr<const EmbeddedSet> set, std::vector<Point> points,
                             Provenance provenance)
    : set_(std::move(set)), points_(std::move(points)), provenance_(std::move(provenance)) {
  if (!set_) throw Error(ErrorKind::InvalidArgument, "configuration needs a set");
  const double tol = 1e-10 * set_->diameter();
  for (const Point& p : points_) {
    if (p.dim != set_->ambient_dim())
      throw Error(ErrorKind::InvalidArgument, "point has the wrong ambient dimension");
    if (!p.is_finite()) throw Error(ErrorKind::InvalidArgument, "point coordinates must be finite");
    if (set_->distance_to(p) > tol)
      throw Error(ErrorKind::InvalidArgument, "configuration point does not lie on the set");
  }
}

double Configuration::distance_floor() const { return 1e-14 * set_->diameter(); }

InversePower::InversePower(double s) : s_(s), mode_(0) {
  if (!(std::isfinite(s) && s > 0.0)) throw Error(ErrorKind::InvalidArgument, "s must be positive");
  if (s == 1.0) mode_ = 1;
  else if (s == 2.0) mode_ = 2;
  else if (s == 3.0) mode_ = 3;
  else if (s == 4.0) mode_ = 4;
  else if (s == 6.0) mode_ = 6;
}

double InversePower::operator()(double r2) const {
  switch (mode_) {
    case 1: return 1.0 / std::sqrt(r2);
    case 2: return 1.0 / r2;
    case 3: return 1.0 / (r2 * std::sqrt(r2));
    case 4: return 1.0 / (r2 * r2);
    case 6: return 1.0 / (r2 * r2 * r2);
    default: return std::pow(r2, -0.5 * s_);
  }
}

namespace {

// Unit-weight kernels specialised on the ambient dimension.
template <std::size_t D>
double unit_row_energy(std::span<const Point> pts, std::size_t i, const InversePower& inv,
                       double floor2, bool& collided) {
  CompensatedSum acc;
  const Point& xi = pts[i];
  for (std::size_t j = i + 1; j < pts.size(); ++j) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < D; ++k) {
      const double t = xi.x[k] - pts[j].x[k];
      r2 += t * t;
    }
    if (!(r2 > floor2)) {
      collided = true;
      return 0.0;
    }
    acc += 2.0 * inv(r2);
  }
  return acc.value();
}

template <std::size_t D>
double unit_row_energy_dispatch(std::size_t dim, std::span<const Point> pts, std::size_t i,
                                const InversePower& inv, double floor2, bool& collided) {
  if constexpr (D == 0) {
    return 0.0;
  } else {
    if (dim == D) return unit_row_energy<D>(pts, i, inv, floor2, collided);
    return unit_row_energy_dispatch<D - 1>(dim, pts, i, inv, floor2, collided);
  }
}

// Serial unit-weight gradient over unordered pairs, accumulating both ends.
template <std::size_t D>
bool unit_gradient_pairs(std::span<const Point> pts, double s, const InversePower& inv,
                         double floor2, std::vector<Point>& grad) {
  const std::size_t n = pts.size();
  std::vector<std::array<double, D>> g(n);
  for (auto& v : g) v.fill(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& xi = pts[i];
    std::array<double, D> gi{};
    for (std::size_t j = i + 1; j < n; ++j) {
      std::array<double, D> diff;
      double r2 = 0.0;
      for (std::size_t k = 0; k < D; ++k) {
        diff[k] = xi.x[k] - pts[j].x[k];
        r2 += diff[k] * diff[k];
      }
      if (!(r2 > floor2)) return false;
      const double c = -2.0 * s * inv(r2) / r2;
      for (std::size_t k = 0; k < D; ++k) {
        gi[k] += c * diff[k];
        g[j][k] -= c * diff[k];
      }
    }
    for (std::size_t k = 0; k < D; ++k) g[i][k] += gi[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    Point p(D);
    for (std::size_t k = 0; k < D; ++k) p.x[k] = g[i][k];
    grad[i] = p;
  }
  return true;
}

template <std::size_t D>
bool unit_gradient_dispatch(std::size_t dim, std::span<const Point> pts, double s,
                            const InversePower& inv, double floor2, std::vector<Point>& grad) {
  if constexpr (D == 0) {
    return false;
  } else {
    if (dim == D) return unit_gradient_pairs<D>(pts, s, inv, floor2, grad);
    return unit_gradient_dispatch<D - 1>(dim, pts, s, inv, floor2, grad);
  }
}

double neg_power(double v, double q) {
  if (q == 1.0) return 1.0 / v;
  if (q == 0.5) return 1.0 / std::sqrt(v);
  if (q == 2.0) return 1.0 / (v * v);
  return std::pow(v, -q);
}

// Per-point values of a weight's closed pair form.
struct FormCache {
  const PairForm& form;
  std::vector<double> phi;
  std::vector<Point> grad_phi;

  FormCache(const PairForm& f, std::span<const Point> pts, bool with_grad) : form(f) {
    phi.reserve(pts.size());
    for (const Point& p : pts) phi.push_back(f.phi(p));
    if (with_grad) {
      grad_phi.reserve(pts.size());
      for (const Point& p : pts) grad_phi.push_back(f.grad_phi(p));
    }
  }

  double weight(std::size_t i, std::size_t j, double r) const {
    if (form.kind == PairForm::Kind::PowerSum) return form.scale * (phi[i] + phi[j]);
    return form.scale * neg_power(phi[i] * phi[j] + r, form.q);
  }
};

// One gradient row for a closed-form weight, specialised on the dimension.
template <std::size_t D>
bool form_gradient_row(std::span<const Point> pts, std::size_t i, double s,
                       const InversePower& inv, double floor2, const FormCache& c, Point& out) {
  const PairForm& f = c.form;
  const bool sum = f.kind == PairForm::Kind::PowerSum;
  const Point& xi = pts[i];
  const double phi_i = c.phi[i];
  std::array<double, D> gphi{};
  for (std::size_t k = 0; k < D; ++k) gphi[k] = c.grad_phi[i].x[k];
  std::array<double, D> g{};
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == i) continue;
    std::array<double, D> diff;
    double r2 = 0.0;
    for (std::size_t k = 0; k < D; ++k) {
      diff[k] = xi.x[k] - pts[j].x[k];
      r2 += diff[k] * diff[k];
    }
    if (!(r2 > floor2)) return false;
    const double r = std::sqrt(r2);
    const double kr = inv(r2);
    double w, a, b;  // grad_first = a * grad phi_i + b * diff
    if (sum) {
      w = f.scale * (phi_i + c.phi[j]);
      a = f.scale;
      b = 0.0;
    } else {
      const double base = phi_i * c.phi[j] + r;
      w = f.scale * neg_power(base, f.q);
      const double dw = -f.q * w / base;
      a = dw * c.phi[j];
      b = dw / r;
    }
    const double ca = 2.0 * kr * a;
    const double cb = 2.0 * kr * b - 2.0 * s * w * kr / r2;
    for (std::size_t k = 0; k < D; ++k) g[k] += ca * gphi[k] + cb * diff[k];
  }
  for (std::size_t k = 0; k < D; ++k) out.x[k] = g[k];
  return true;
}

template <std::size_t D>
bool form_gradient_row_dispatch(std::size_t dim, std::span<const Point> pts, std::size_t i,
                                double s, const InversePower& inv, double floor2,
                                const FormCache& c, Point& out) {
  if constexpr (D == 0) {
    return false;
  } else {
    if (dim == D) return form_gradient_row<D>(pts, i, s, inv, floor2, c, out);
    return form_gradient_row_dispatch<D - 1>(dim, pts, i, s, inv, floor2, c, out);
  }
}

}  // namespace

std::optional<double> try_energy_total(std::span<const Point> pts, double s, const WeightFn& w,
                                       const PairOptions& opts) {
  const InversePower inv(s);
  const std::size_t n = pts.size();
  const double floor2 = opts.distance_floor * opts.distance_floor;
  const bool unit = w.is_unit();
  const bool symmetric = w.metadata().is_symmetric;
  const std::size_t dim = n ? pts[0].dim : 0;
  std::vector<double> rows(n, 0.0);
  std::atomic<bool> collided{false};
  std::optional<FormCache> cache;
  if (!unit && w.metadata().form.kind != PairForm::Kind::None)
    cache.emplace(w.metadata().form, pts, false);

  for_each_row(n, opts.workers, [&](std::size_t i) {
    if (cache) {
      CompensatedSum acc;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double r2 = distance2(pts[i], pts[j]);
        if (!(r2 > floor2)) {
          collided.store(true, std::memory_order_relaxed);
          return;
        }
        const double a = cache->weight(i, j, std::sqrt(r2));
        check_weight_value(a);
        acc += 2.0 * a * inv(r2);
      }
      rows[i] = acc.value();
      return;
    }
    if (unit) {
      bool hit = false;
      rows[i] = unit_row_energy_dispatch<kMaxAmbientDim>(dim, pts, i, inv, floor2, hit);
      if (hit) collided.store(true, std::memory_order_relaxed);
      return;
    }
    CompensatedSum acc;
    const Point& xi = pts[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = distance2(xi, pts[j]);
      if (!(r2 > floor2)) {
        collided.store(true, std::memory_order_relaxed);
        return;
      }
      const double a = w.raw(xi, pts[j]);
      check_weight_value(a);
      double pair_weight;
      if (symmetric) {
        pair_weight = 2.0 * a;
      } else {
        const double b = w.raw(pts[j], xi);
        check_weight_value(b);
        pair_weight = a + b;
      }
      acc += pair_weight * inv(r2);
    }
    rows[i] = acc.value();
  });
  if (collided.load()) return std::nullopt;
  return compensated_sum(rows);
}

std::vector<Point> energy_gradient(std::span<const Point> pts, double s, const WeightFn& w,
                                   const PairOptions& opts) {
  const bool unit = w.is_unit();
  if (!unit && !(w.metadata().is_symmetric && w.metadata().differentiable))
    throw Error(ErrorKind::NonDifferentiable,
                "gradient needs a symmetric differentiable weight (got '" + w.metadata().kind + "')");
  const InversePower inv(s);
  const std::size_t n = pts.size();
  const double floor2 = opts.distance_floor * opts.distance_floor;
  const std::size_t dim = n ? pts[0].dim : 0;
  std::vector<Point> grad(n, Point(dim));

  // One worker: unordered pairs, each evaluated once. Several workers: full
  // rows, each owned by one worker. Either way the result is bit-stable for a
  // fixed worker count.
  if (unit && opts.workers <= 1) {
    if (!unit_gradient_dispatch<kMaxAmbientDim>(dim, pts, s, inv, floor2, grad))
      throw Error(ErrorKind::CoincidentPoints, "coincident points: pair distance below floor");
    return grad;
  }

  std::atomic<bool> collided{false};
  std::optional<FormCache> cache;
  if (!unit && w.metadata().form.kind != PairForm::Kind::None && w.metadata().form.grad_phi)
    cache.emplace(w.metadata().form, pts, true);
  for_each_row(n, opts.workers, [&](std::size_t i) {
    const Point& xi = pts[i];
    Point g(xi.dim);
    if (cache) {
      if (!form_gradient_row_dispatch<kMaxAmbientDim>(xi.dim, pts, i, s, inv, floor2, *cache, g))
        collided.store(true, std::memory_order_relaxed);
      grad[i] = g;
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Point diff = xi - pts[j];
      const double r2 = norm2(diff);
      if (!(r2 > floor2)) {
        collided.store(true, std::memory_order_relaxed);
        return;
      }
      const double k = inv(r2);
      if (unit) {
        g += diff * (-2.0 * s * k / r2);
      } else {
        const double wij = w.raw(xi, pts[j]);
        check_weight_value(wij);
        g += w.grad_first(xi, pts[j]) * (2.0 * k);
        g += diff * (-2.0 * s * wij * k / r2);
      }
    }
    grad[i] = g;
  });
  if (collided.load())
    throw Error(ErrorKind::CoincidentPoints, "coincident points: pair distance below floor");
  return grad;
}

double point_potential(const Point& y, std::span<const Point> pts, std::size_t skip, double s,
                       const WeightFn& w) {
  const InversePower inv(s);
  CompensatedSum acc;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == skip) continue;
    const double r2 = distance2(y, pts[j]);
    if (r2 == 0.0) return std::numeric_limits<double>::infinity();
    acc += (w.is_unit() ? 1.0 : w(y, pts[j])) * inv(r2);
  }
  return acc.value();
}

EnergyReport energy(const Configuration& config, double s, const WeightFn& w, unsigned workers) {
  const std::size_t n = config.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "energy needs at least two points");
  PairOptions opts;
  opts.distance_floor = config.distance_floor();
  opts.workers = workers;
  const auto total = try_energy_total(config.points(), s, w, opts);
  if (!total)
    throw Error(ErrorKind::CoincidentPoints, "coincident points: pair distance below 1e-14 * diam(A)");

  EnergyReport rep;
  rep.total = *total;
  rep.per_point.assign(n, 0.0);
  std::vector<double> row_min(n), row_max(n);
  const InversePower inv(s);
  const auto pts = config.points();
  for_each_row(n, workers, [&](std::size_t i) {
    CompensatedSum acc;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r2 = distance2(pts[i], pts[j]);
      lo = std::min(lo, r2);
      hi = std::max(hi, r2);
      acc += (w.is_unit() ? 1.0 : w(pts[i], pts[j])) * inv(r2);
    }
    rep.per_point[i] = acc.value();
    row_min[i] = lo;
    row_max[i] = hi;
  });
  rep.min_pair_distance = std::sqrt(*std::min_element(row_min.begin(), row_min.end()));
  rep.max_pair_distance = std::sqrt(*std::max_element(row_max.begin(), row_max.end()));
  return rep;
}

std::vector<Point> gradient(const Configuration& config, double s, const WeightFn& w,
                            unsigned workers) {
  PairOptions opts;
  opts.distance_floor = config.distance_floor();
  opts.workers = workers;
  return energy_gradient(config.points(), s, w, opts);
}

double scaled_energy(const Configuration& config, double gamma, double s, const WeightFn& w) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "scaling factor must lie in (0, 1]");
  const auto& zeros = w.metadata().zeros;
  if (w.metadata().kind != "power_zero" || zeros.size() != 1 || norm(zeros[0].location) != 0.0)
    throw Error(ErrorKind::InvalidArgument, "scaled_energy needs power_zero_weight at the origin");
  for (const Point& p : config.points())
    if (norm(p) > 1.0 + 1e-12)
      throw Error(ErrorKind::InvalidArgument, "scaled_energy needs a configuration in the unit ball");
  const double t = zeros[0].order;

  const double base = energy(config, s, w).total;
  std::vector<Point> scaled(config.points().begin(), config.points().end());
  for (Point& p : scaled) p *= gamma;
  PairOptions opts;
  opts.distance_floor = config.distance_floor();
  const auto value = try_energy_total(scaled, s, w, opts);
  if (!value) throw Error(ErrorKind::CoincidentPoints, "coincident points after scaling");
  const double predicted = std::pow(gamma, t - s) * base;
  if (std::fabs(*value - predicted) > 1e-12 * std::fabs(predicted))
    throw Error(ErrorKind::InvalidArgument, "scaling law E(gamma w) = gamma^(t-s) E(w) violated");
  return *value;
}

}  // namespace riesz
