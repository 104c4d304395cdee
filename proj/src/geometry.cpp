#include "riesz/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "riesz/error.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Relative slack inside which a point counts as already lying on a round
// component; retraction leaves such points untouched.
constexpr double kOnSetSlack = 8.0 * kEps;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

double wrap_angle(double theta) {
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return theta;
}

double plane_norm(const Point& q, std::size_t i) {
  return std::hypot(q[i], q[i + 1]);
}

// Radially rescales the coordinates [first, first + count) of q to length r.
// Leaves them untouched if they already have length r to rounding.
void push_to_radius(Point& q, std::size_t first, std::size_t count, double r) {
  double m = 0.0;
  for (std::size_t i = first; i < first + count; ++i) m = std::max(m, std::fabs(q[i]));
  if (m == 0.0)
    throw Error(ErrorKind::Singularity, "retraction undefined at the centre of a round component");
  double n2 = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    const double t = q[i] / m;
    n2 += t * t;
  }
  const double n = m * std::sqrt(n2);
  if (std::fabs(n - r) <= kOnSetSlack * r) return;
  const double scale = r / n;
  for (std::size_t i = first; i < first + count; ++i) q[i] *= scale;
}

// Removes the component of v along the coordinates [first, first+count) of q.
void remove_radial(const Point& q, Point& v, std::size_t first, std::size_t count) {
  double qq = 0.0, qv = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    qq += q[i] * q[i];
    qv += q[i] * v[i];
  }
  if (qq == 0.0) return;
  const double c = qv / qq;
  for (std::size_t i = first; i < first + count; ++i) v[i] -= c * q[i];
}

Point arc_endpoint(double radius, double angle) {
  return Point{radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace

// --- construction ---------------------------------------------------------

EmbeddedSet::Component EmbeddedSet::make_component(const Primitive& prim,
                                                   const Point& offset) {
  Component c;
  c.prim = prim;
  c.offset = offset;
  Chart& ch = c.chart;
  const double a = prim.a;
  const double b = prim.b;
  c.centre = offset;
  switch (prim.kind) {
    case SetKind::Circle:
      ch.param_dim = 1;
      ch.hi[0] = kTwoPi;
      ch.periodic[0] = true;
      ch.jacobian = a;
      c.radius = a;
      break;
    case SetKind::Arc:
      ch.param_dim = 1;
      ch.hi[0] = b;
      ch.jacobian = a;
      c.radius = a;
      break;
    case SetKind::Interval:
      ch.param_dim = 1;
      ch.hi[0] = a;
      c.centre[0] += a / 2.0;
      c.radius = a / 2.0;
      break;
    case SetKind::Cube:
      ch.param_dim = prim.cube_dim;
      for (std::size_t i = 0; i < prim.cube_dim; ++i) {
        ch.hi[i] = a;
        c.centre[i] += a / 2.0;
      }
      c.radius = a * std::sqrt(static_cast<double>(prim.cube_dim)) / 2.0;
      break;
    case SetKind::Sphere2:
      ch.param_dim = 2;
      ch.lo[0] = -a;
      ch.hi[0] = a;
      ch.hi[1] = kTwoPi;
      ch.periodic[1] = true;
      ch.jacobian = a;
      c.radius = a;
      break;
    case SetKind::FlatTorus:
      ch.param_dim = 2;
      ch.hi[0] = kTwoPi;
      ch.hi[1] = kTwoPi;
      ch.periodic[0] = ch.periodic[1] = true;
      ch.jacobian = a * b;
      c.radius = std::hypot(a, b);
      break;
    case SetKind::DisjointUnion:
      throw Error(ErrorKind::UnsupportedKind, "a union cannot be a primitive component");
  }
  return c;
}

namespace {

double primitive_diameter(const EmbeddedSet::Primitive& p) {
  switch (p.kind) {
    case SetKind::Circle:
    case SetKind::Sphere2:
      return 2.0 * p.a;
    case SetKind::Arc:
      return p.b >= std::numbers::pi ? 2.0 * p.a : 2.0 * p.a * std::sin(p.b / 2.0);
    case SetKind::Interval:
      return p.a;
    case SetKind::Cube:
      return p.a * std::sqrt(static_cast<double>(p.cube_dim));
    case SetKind::FlatTorus:
      return 2.0 * std::hypot(p.a, p.b);
    case SetKind::DisjointUnion:
      break;
  }
  throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
}

std::size_t primitive_ambient_dim(const EmbeddedSet::Primitive& p) {
  switch (p.kind) {
    case SetKind::Circle:
    case SetKind::Arc:
      return 2;
    case SetKind::Interval:
      return 1;
    case SetKind::Cube:
      return p.cube_dim;
    case SetKind::Sphere2:
      return 3;
    case SetKind::FlatTorus:
      return 4;
    case SetKind::DisjointUnion:
      break;
  }
  throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
}

std::size_t primitive_hausdorff_dim(const EmbeddedSet::Primitive& p) {
  switch (p.kind) {
    case SetKind::Circle:
    case SetKind::Arc:
    case SetKind::Interval:
      return 1;
    case SetKind::Cube:
      return p.cube_dim;
    case SetKind::Sphere2:
    case SetKind::FlatTorus:
      return 2;
    case SetKind::DisjointUnion:
      break;
  }
  throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
}

EmbeddedSet::Primitive make_primitive(SetKind kind, double a, double b = 0.0,
                                      std::size_t cube_dim = 0) {
  EmbeddedSet::Primitive p;
  p.kind = kind;
  p.a = a;
  p.b = b;
  p.cube_dim = cube_dim;
  return p;
}

}  // namespace

void EmbeddedSet::finalize() {
  const Primitive& first = parts_.front().prim;
  ambient_dim_ = primitive_ambient_dim(first);
  hausdorff_dim_ = primitive_hausdorff_dim(first);
  diameter_ = 0.0;
  gap_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    diameter_ = std::max(diameter_, primitive_diameter(parts_[i].prim));
    for (std::size_t j = 0; j < i; ++j) {
      const double centres = distance(parts_[i].centre, parts_[j].centre);
      diameter_ = std::max(diameter_, centres + parts_[i].radius + parts_[j].radius);
      gap_ = std::min(gap_, centres - parts_[i].radius - parts_[j].radius);
    }
  }
}

EmbeddedSet EmbeddedSet::circle(double radius) {
  require(std::isfinite(radius) && radius > 0.0, "circle radius must be positive and finite");
  EmbeddedSet s;
  s.kind_ = SetKind::Circle;
  s.parts_.push_back(make_component(make_primitive(SetKind::Circle, radius), Point(2)));
  s.finalize();
  return s;
}

EmbeddedSet EmbeddedSet::arc(double radius, double span) {
  require(std::isfinite(radius) && radius > 0.0, "arc radius must be positive and finite");
  require(std::isfinite(span) && span > 0.0 && span < kTwoPi, "arc span must lie in (0, 2*pi)");
  EmbeddedSet s;
  s.kind_ = SetKind::Arc;
  s.parts_.push_back(make_component(make_primitive(SetKind::Arc, radius, span), Point(2)));
  s.finalize();
  return s;
}

EmbeddedSet EmbeddedSet::interval(double length) {
  require(std::isfinite(length) && length > 0.0, "interval length must be positive and finite");
  EmbeddedSet s;
  s.kind_ = SetKind::Interval;
  s.parts_.push_back(make_component(make_primitive(SetKind::Interval, length), Point(1)));
  s.finalize();
  return s;
}

EmbeddedSet EmbeddedSet::cube(double side, std::size_t dim) {
  require(std::isfinite(side) && side > 0.0, "cube side must be positive and finite");
  require(dim >= 1 && dim <= kMaxAmbientDim, "cube dimension must be in [1, 4]");
  EmbeddedSet s;
  s.kind_ = SetKind::Cube;
  s.parts_.push_back(make_component(make_primitive(SetKind::Cube, side, 0.0, dim), Point(dim)));
  s.finalize();
  return s;
}

EmbeddedSet EmbeddedSet::sphere2(double radius) {
  require(std::isfinite(radius) && radius > 0.0, "sphere radius must be positive and finite");
  EmbeddedSet s;
  s.kind_ = SetKind::Sphere2;
  s.parts_.push_back(make_component(make_primitive(SetKind::Sphere2, radius), Point(3)));
  s.finalize();
  return s;
}

EmbeddedSet EmbeddedSet::flat_torus(double major, double minor) {
  require(std::isfinite(major) && major > 0.0, "torus major radius must be positive and finite");
  require(std::isfinite(minor) && minor > 0.0, "torus minor radius must be positive and finite");
  EmbeddedSet s;
  s.kind_ = SetKind::FlatTorus;
  s.parts_.push_back(make_component(make_primitive(SetKind::FlatTorus, major, minor), Point(4)));
  s.finalize();
  return s;
}

EmbeddedSet EmbeddedSet::disjoint_union(const std::vector<Placement>& parts) {
  require(!parts.empty(), "disjoint union needs at least one component");
  EmbeddedSet s;
  s.kind_ = SetKind::DisjointUnion;
  for (const Placement& pl : parts) {
    require(pl.offset.is_finite(), "component offset must be finite");
    require(pl.offset.dim == pl.set.ambient_dim(), "component offset has the wrong dimension");
    // Nested unions are flattened.
    for (const Component& c : pl.set.parts_)
      s.parts_.push_back(make_component(c.prim, c.offset + pl.offset));
  }
  const std::size_t amb = primitive_ambient_dim(s.parts_.front().prim);
  const std::size_t hd = primitive_hausdorff_dim(s.parts_.front().prim);
  for (const Component& c : s.parts_) {
    require(primitive_ambient_dim(c.prim) == amb, "union components must share the ambient dimension");
    require(primitive_hausdorff_dim(c.prim) == hd, "union components must share the Hausdorff dimension");
  }
  s.finalize();
  require(s.gap_ > 0.0, "union components must be separated by a positive distance");
  return s;
}

std::string EmbeddedSet::kind_name() const {
  switch (kind_) {
    case SetKind::Circle: return "circle";
    case SetKind::Arc: return "arc";
    case SetKind::Interval: return "interval";
    case SetKind::Cube: return "cube";
    case SetKind::Sphere2: return "sphere2";
    case SetKind::FlatTorus: return "flat_torus";
    case SetKind::DisjointUnion: return "disjoint_union";
  }
  return "unknown";
}

// --- measure and charts ---------------------------------------------------

double EmbeddedSet::component_measure(std::size_t comp) const {
  const Chart& ch = parts_.at(comp).chart;
  double m = ch.jacobian;
  for (std::size_t i = 0; i < ch.param_dim; ++i) m *= ch.hi[i] - ch.lo[i];
  return m;
}

double EmbeddedSet::measure() const {
  CompensatedSum m;
  for (std::size_t i = 0; i < parts_.size(); ++i) m += component_measure(i);
  return m.value();
}

double hausdorff_measure(const EmbeddedSet& set) { return set.measure(); }

Point EmbeddedSet::from_param(std::size_t comp, std::span<const double> u) const {
  const Component& c = parts_.at(comp);
  const Primitive& p = c.prim;
  Point q(ambient_dim_);
  switch (p.kind) {
    case SetKind::Circle:
    case SetKind::Arc:
      q = Point{p.a * std::cos(u[0]), p.a * std::sin(u[0])};
      break;
    case SetKind::Interval:
      q = Point{u[0]};
      break;
    case SetKind::Cube:
      q = Point::from_span(u.first(p.cube_dim));
      break;
    case SetKind::Sphere2: {
      const double z = std::clamp(u[0], -p.a, p.a);
      const double rho = std::sqrt(std::max(0.0, (p.a - z) * (p.a + z)));
      q = Point{rho * std::cos(u[1]), rho * std::sin(u[1]), z};
      break;
    }
    case SetKind::FlatTorus:
      q = Point{p.a * std::cos(u[0]), p.a * std::sin(u[0]), p.b * std::cos(u[1]),
                p.b * std::sin(u[1])};
      break;
    case SetKind::DisjointUnion:
      throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
  }
  return q + c.offset;
}

std::array<double, kMaxAmbientDim> EmbeddedSet::to_param(std::size_t comp, const Point& pt) const {
  const Component& c = parts_.at(comp);
  const Primitive& p = c.prim;
  const Point q = pt - c.offset;
  std::array<double, kMaxAmbientDim> u{};
  switch (p.kind) {
    case SetKind::Circle:
      u[0] = wrap_angle(std::atan2(q[1], q[0]));
      break;
    case SetKind::Arc: {
      double th = wrap_angle(std::atan2(q[1], q[0]));
      if (th > p.b) th = (kTwoPi - th < th - p.b) ? 0.0 : p.b;
      u[0] = th;
      break;
    }
    case SetKind::Interval:
      u[0] = std::clamp(q[0], 0.0, p.a);
      break;
    case SetKind::Cube:
      for (std::size_t i = 0; i < p.cube_dim; ++i) u[i] = std::clamp(q[i], 0.0, p.a);
      break;
    case SetKind::Sphere2:
      u[0] = std::clamp(q[2], -p.a, p.a);
      u[1] = wrap_angle(std::atan2(q[1], q[0]));
      break;
    case SetKind::FlatTorus:
      u[0] = wrap_angle(std::atan2(q[1], q[0]));
      u[1] = wrap_angle(std::atan2(q[3], q[2]));
      break;
    case SetKind::DisjointUnion:
      throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
  }
  return u;
}

// --- distance, retraction, tangent cone -----------------------------------

double EmbeddedSet::local_distance(std::size_t comp, const Point& pt) const {
  const Component& c = parts_[comp];
  const Primitive& p = c.prim;
  const Point q = pt - c.offset;
  switch (p.kind) {
    case SetKind::Circle:
    case SetKind::Sphere2:
      return std::fabs(norm(q) - p.a);
    case SetKind::Arc: {
      const double n = norm(q);
      if (n == 0.0) return p.a;
      const double th = wrap_angle(std::atan2(q[1], q[0]));
      if (th <= p.b) return std::fabs(n - p.a);
      return std::min(distance(q, arc_endpoint(p.a, 0.0)), distance(q, arc_endpoint(p.a, p.b)));
    }
    case SetKind::Interval:
    case SetKind::Cube: {
      double s = 0.0;
      for (std::size_t i = 0; i < q.dim; ++i) {
        const double t = q[i] - std::clamp(q[i], 0.0, p.a);
        s += t * t;
      }
      return std::sqrt(s);
    }
    case SetKind::FlatTorus:
      return std::hypot(plane_norm(q, 0) - p.a, plane_norm(q, 2) - p.b);
    case SetKind::DisjointUnion:
      break;
  }
  throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
}

Point EmbeddedSet::local_retract(std::size_t comp, const Point& pt) const {
  const Component& c = parts_[comp];
  const Primitive& p = c.prim;
  Point q = pt - c.offset;
  switch (p.kind) {
    case SetKind::Circle:
      push_to_radius(q, 0, 2, p.a);
      break;
    case SetKind::Sphere2:
      push_to_radius(q, 0, 3, p.a);
      break;
    case SetKind::Arc: {
      if (q[0] == 0.0 && q[1] == 0.0)
        throw Error(ErrorKind::Singularity, "retraction undefined at the centre of an arc");
      const double th = wrap_angle(std::atan2(q[1], q[0]));
      if (th <= p.b) {
        push_to_radius(q, 0, 2, p.a);
      } else {
        const Point e0 = arc_endpoint(p.a, 0.0);
        const Point e1 = arc_endpoint(p.a, p.b);
        const double d0 = distance2(q, e0);
        const double d1 = distance2(q, e1);
        if (d0 < d1)
          q = e0;
        else if (d1 < d0)
          q = e1;
        else
          q = lex_less(e0 + c.offset, e1 + c.offset) ? e0 : e1;
      }
      break;
    }
    case SetKind::Interval:
    case SetKind::Cube:
      for (std::size_t i = 0; i < q.dim; ++i) q[i] = std::clamp(q[i], 0.0, p.a);
      break;
    case SetKind::FlatTorus:
      push_to_radius(q, 0, 2, p.a);
      push_to_radius(q, 2, 2, p.b);
      break;
    case SetKind::DisjointUnion:
      throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
  }
  return q + c.offset;
}

std::size_t EmbeddedSet::component_of(const Point& p) const {
  std::size_t best = 0;
  double best_d = local_distance(0, p);
  for (std::size_t i = 1; i < parts_.size(); ++i) {
    const double d = local_distance(i, p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double EmbeddedSet::distance_to(const Point& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parts_.size(); ++i) best = std::min(best, local_distance(i, p));
  return best;
}

Point EmbeddedSet::retract(const Point& p) const {
  if (p.dim != ambient_dim_)
    throw Error(ErrorKind::InvalidArgument, "point has the wrong ambient dimension");
  if (!p.is_finite()) throw Error(ErrorKind::InvalidArgument, "point must be finite");
  if (parts_.size() == 1) return local_retract(0, p);

  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parts_.size(); ++i) best_d = std::min(best_d, local_distance(i, p));
  bool have = false;
  Point best;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (local_distance(i, p) != best_d) continue;
    Point r = local_retract(i, p);
    if (!have || lex_less(r, best)) best = r;
    have = true;
  }
  return best;
}

Point EmbeddedSet::project_direction(const Point& pt, const Point& v) const {
  const std::size_t comp = parts_.size() == 1 ? 0 : component_of(pt);
  const Component& c = parts_[comp];
  const Primitive& p = c.prim;
  const Point q = pt - c.offset;
  Point out = v;
  switch (p.kind) {
    case SetKind::Circle:
      remove_radial(q, out, 0, 2);
      break;
    case SetKind::Sphere2:
      remove_radial(q, out, 0, 3);
      break;
    case SetKind::FlatTorus:
      remove_radial(q, out, 0, 2);
      remove_radial(q, out, 2, 2);
      break;
    case SetKind::Arc: {
      remove_radial(q, out, 0, 2);
      const double th = wrap_angle(std::atan2(q[1], q[0]));
      const Point tangent{-std::sin(th), std::cos(th)};
      const double along = dot(out, tangent);
      const double tol = 64.0 * kEps * kTwoPi;
      const bool at_start = th <= tol || kTwoPi - th <= tol;
      const bool at_end = std::fabs(th - p.b) <= tol;
      if ((at_start && along < 0.0) || (at_end && along > 0.0)) out = Point(out.dim);
      break;
    }
    case SetKind::Interval:
    case SetKind::Cube:
      for (std::size_t i = 0; i < q.dim; ++i) {
        if (q[i] <= 0.0 && out[i] < 0.0) out[i] = 0.0;
        if (q[i] >= p.a && out[i] > 0.0) out[i] = 0.0;
      }
      break;
    case SetKind::DisjointUnion:
      throw Error(ErrorKind::UnsupportedKind, "unsupported primitive");
  }
  return out;
}

Point EmbeddedSet::sample(Rng& rng) const {
  std::size_t comp = 0;
  if (parts_.size() > 1) {
    const double target = uniform01(rng) * measure();
    double acc = 0.0;
    comp = parts_.size() - 1;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      acc += component_measure(i);
      if (target < acc) {
        comp = i;
        break;
      }
    }
  }
  const Chart& ch = parts_[comp].chart;
  std::array<double, kMaxAmbientDim> u{};
  for (std::size_t i = 0; i < ch.param_dim; ++i)
    u[i] = ch.lo[i] + (ch.hi[i] - ch.lo[i]) * uniform01(rng);
  return from_param(comp, std::span<const double>(u.data(), ch.param_dim));
}

// --- partitions -----------------------------------------------------------

RegionPartition RegionPartition::grid(const EmbeddedSet& set, std::vector<std::size_t> bins) {
  require(!bins.empty(), "partition needs at least one bin count");
  for (std::size_t b : bins) require(b >= 1, "bin counts must be positive");
  RegionPartition part;
  part.set_ = set;
  for (std::size_t comp = 0; comp < set.component_count(); ++comp) {
    const Chart& ch = set.chart(comp);
    std::vector<std::size_t> k(ch.param_dim);
    if (bins.size() == 1) {
      std::fill(k.begin(), k.end(), bins[0]);
    } else {
      require(bins.size() == ch.param_dim, "bin counts must match the chart dimension");
      k = bins;
    }
    part.first_.push_back(part.regions_.size());
    std::size_t cells = 1;
    for (std::size_t b : k) cells *= b;
    for (std::size_t flat = 0; flat < cells; ++flat) {
      Region r;
      r.component = comp;
      r.param_dim = ch.param_dim;
      r.measure = ch.jacobian;
      std::size_t rem = flat;
      for (std::size_t axis = ch.param_dim; axis-- > 0;) {
        const std::size_t idx = rem % k[axis];
        rem /= k[axis];
        const double w = (ch.hi[axis] - ch.lo[axis]) / static_cast<double>(k[axis]);
        r.lo[axis] = ch.lo[axis] + w * static_cast<double>(idx);
        r.hi[axis] = idx + 1 == k[axis] ? ch.hi[axis] : ch.lo[axis] + w * static_cast<double>(idx + 1);
        r.measure *= w;
      }
      part.regions_.push_back(r);
    }
    part.bins_.push_back(std::move(k));
  }
  return part;
}

double RegionPartition::total_measure() const {
  CompensatedSum acc;
  for (const Region& r : regions_) acc += r.measure;
  return acc.value();
}

std::size_t RegionPartition::locate(const Point& p) const {
  const std::size_t comp = set_.component_count() == 1 ? 0 : set_.component_of(p);
  const Chart& ch = set_.chart(comp);
  const auto u = set_.to_param(comp, p);
  const auto& k = bins_[comp];
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < ch.param_dim; ++axis) {
    const double t = (u[axis] - ch.lo[axis]) / (ch.hi[axis] - ch.lo[axis]);
    const double scaled = std::floor(t * static_cast<double>(k[axis]));
    const std::size_t idx = scaled <= 0.0 ? 0
                            : std::min(static_cast<std::size_t>(scaled), k[axis] - 1);
    flat = flat * k[axis] + idx;
  }
  return first_[comp] + flat;
}

// --- integration ----------------------------------------------------------

namespace {

IntegralResult curve_integral(const EmbeddedSet& set, const ScalarFn& f, const Region& region,
                              const IntegrationOptions& opts) {
  const Chart& ch = set.chart(region.component);
  std::vector<double> cuts{region.lo[0], region.hi[0]};
  const double tol = 1e-9 * set.diameter();
  for (const Point& sp : opts.singular_points) {
    if (sp.dim != set.ambient_dim()) continue;
    if (set.component_of(sp) != region.component || set.distance_to(sp) > tol) continue;
    const double u = set.to_param(region.component, sp)[0];
    if (u > region.lo[0] && u < region.hi[0]) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());

  // Nodes closer than 1e-140 to an endpoint are skipped: nearer than that a
  // squared distance to a singular point underflows to zero.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15, 1e-140);
  const auto g = [&](double u) {
    const double v = f(set.from_param(region.component, std::span<const double>(&u, 1)));
    return v * ch.jacobian;
  };
  IntegralResult out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    double err = 0.0, l1 = 0.0;
    double q = 0.0;
    try {
      q = integrator.integrate(g, cuts[i], cuts[i + 1], opts.rel_tol, &err, &l1);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Divergence, std::string("integrand is not integrable: ") + e.what());
    }
    if (!std::isfinite(q) || err > 1e-6 * l1 + 1e-300)
      throw Error(ErrorKind::Divergence, "quadrature refinement diverges; integrand not integrable");
    out.value += q;
    out.error += err;
  }
  return out;
}

IntegralResult stratified_mc(const EmbeddedSet& set, const ScalarFn& f, const Region& region,
                             const IntegrationOptions& opts) {
  const Chart& ch = set.chart(region.component);
  const std::size_t dim = region.param_dim;
  const std::size_t m = std::max<std::size_t>(1, opts.mc_strata_per_axis);
  const std::size_t n = std::max<std::size_t>(2, opts.mc_samples_per_stratum);
  std::size_t strata = 1;
  for (std::size_t i = 0; i < dim; ++i) strata *= m;

  Rng rng(opts.mc_seed);
  std::array<double, kMaxAmbientDim> width{};
  double cell_volume = ch.jacobian;
  for (std::size_t i = 0; i < dim; ++i) {
    width[i] = (region.hi[i] - region.lo[i]) / static_cast<double>(m);
    cell_volume *= width[i];
  }

  CompensatedSum total;
  CompensatedSum variance;
  for (std::size_t cell = 0; cell < strata; ++cell) {
    std::array<double, kMaxAmbientDim> base{};
    std::size_t rem = cell;
    for (std::size_t axis = dim; axis-- > 0;) {
      base[axis] = region.lo[axis] + width[axis] * static_cast<double>(rem % m);
      rem /= m;
    }
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::array<double, kMaxAmbientDim> u{};
      for (std::size_t axis = 0; axis < dim; ++axis)
        u[axis] = base[axis] + width[axis] * uniform01(rng);
      const double v = f(set.from_param(region.component, std::span<const double>(u.data(), dim)));
      if (!std::isfinite(v))
        throw Error(ErrorKind::Divergence, "integrand is not finite on the region");
      const double delta = v - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (v - mean);
    }
    total += cell_volume * mean;
    variance += cell_volume * cell_volume * (m2 / static_cast<double>(n - 1)) / static_cast<double>(n);
  }
  IntegralResult out;
  out.value = total.value();
  out.error = std::sqrt(std::max(0.0, variance.value()));
  out.monte_carlo = true;
  return out;
}

}  // namespace

IntegralResult region_integral(const EmbeddedSet& set, const ScalarFn& f, const Region& region,
                               const IntegrationOptions& opts) {
  if (region.component >= set.component_count())
    throw Error(ErrorKind::InvalidArgument, "region does not belong to this set");
  if (region.param_dim == 1) return curve_integral(set, f, region, opts);
  return stratified_mc(set, f, region, opts);
}

IntegralResult integral(const EmbeddedSet& set, const ScalarFn& f, const IntegrationOptions& opts) {
  const RegionPartition whole = RegionPartition::whole(set);
  IntegralResult out;
  double var = 0.0;
  for (const Region& r : whole.regions()) {
    const IntegralResult part = region_integral(set, f, r, opts);
    out.value += part.value;
    out.monte_carlo = out.monte_carlo || part.monte_carlo;
    if (part.monte_carlo)
      var += part.error * part.error;
    else
      out.error += part.error;
  }
  out.error += std::sqrt(var);
  return out;
}

}  // namespace riesz
