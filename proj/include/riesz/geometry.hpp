#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "riesz/point.hpp"

namespace riesz {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits, so draws are identical
/// across standard library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class SetKind { Circle, Arc, Interval, Cube, Sphere2, FlatTorus, DisjointUnion };

/// Parameter box of one connected component. Every catalog chart has a
/// constant area element, so uniform draws in the box are H_d-uniform on the set.
struct Chart {
  std::size_t param_dim = 0;
  std::array<double, kMaxAmbientDim> lo{};
  std::array<double, kMaxAmbientDim> hi{};
  std::array<bool, kMaxAmbientDim> periodic{};
  double jacobian = 1.0;
};

/// A compact set A in R^{d'} from a fixed catalog, with closed-form Hausdorff
/// measure, H_d-uniform sampler and nearest-point retraction.
///
/// Connected kinds are single components centred at the origin (the interval
/// and cube sit in the positive orthant). A disjoint union is a list of
/// components, each carried by a rigid translation.
class EmbeddedSet {
 public:
  struct Placement;

  static EmbeddedSet circle(double radius);
  static EmbeddedSet arc(double radius, double span);
  static EmbeddedSet interval(double length);
  static EmbeddedSet cube(double side, std::size_t dim);
  static EmbeddedSet sphere2(double radius);
  /// Clifford torus (R cos u, R sin u, r cos v, r sin v) in R^4: intrinsically
  /// flat, a 2*pi*R by 2*pi*r periodic rectangle.
  static EmbeddedSet flat_torus(double major, double minor);
  static EmbeddedSet disjoint_union(const std::vector<Placement>& parts);

  SetKind kind() const { return kind_; }
  std::string kind_name() const;
  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t hausdorff_dim() const { return hausdorff_dim_; }

  /// H_d(A), closed form.
  double measure() const;
  /// Exact for connected kinds; for unions an upper bound from bounding balls.
  double diameter() const { return diameter_; }
  /// Certified lower bound on the distance between distinct components
  /// (+inf for a single component).
  double component_gap() const { return gap_; }

  std::size_t component_count() const { return parts_.size(); }
  double component_measure(std::size_t comp) const;
  /// Index of the component nearest to p (ties go to the lower index).
  std::size_t component_of(const Point& p) const;
  const Chart& chart(std::size_t comp) const { return parts_.at(comp).chart; }
  Point from_param(std::size_t comp, std::span<const double> u) const;
  /// Chart coordinates of a point lying on component `comp`.
  std::array<double, kMaxAmbientDim> to_param(std::size_t comp, const Point& p) const;

  /// Nearest point of A; ties broken toward the lexicographically smaller
  /// candidate. Points already on A (to rounding) are returned unchanged, so
  /// the map is exactly idempotent. Throws Singularity where undefined.
  Point retract(const Point& p) const;
  /// Projects a displacement v at p (on A) onto the tangent cone of A at p.
  Point project_direction(const Point& p, const Point& v) const;
  Point sample(Rng& rng) const;
  double distance_to(const Point& p) const;
  bool contains(const Point& p, double tol) const { return distance_to(p) <= tol; }

  struct Primitive {
    SetKind kind = SetKind::Circle;
    double a = 0.0;  // radius | length | side | major radius
    double b = 0.0;  // arc span | minor radius
    std::size_t cube_dim = 0;
  };

 private:
  struct Component {
    Primitive prim;
    Point offset;
    Chart chart;
    Point centre;  // bounding-ball centre, ambient coordinates
    double radius = 0.0;  // bounding-ball radius
  };

  static Component make_component(const Primitive& prim, const Point& offset);
  void finalize();
  double local_distance(std::size_t comp, const Point& p) const;
  Point local_retract(std::size_t comp, const Point& p) const;

  SetKind kind_ = SetKind::Circle;
  std::size_t ambient_dim_ = 0;
  std::size_t hausdorff_dim_ = 0;
  double diameter_ = 0.0;
  double gap_ = 0.0;
  std::vector<Component> parts_;
};

struct EmbeddedSet::Placement {
  EmbeddedSet set;
  Point offset;
};

/// H_d(A) of a catalog set.
double hausdorff_measure(const EmbeddedSet& set);

/// One cell of a RegionPartition: an axis-aligned box in the chart of one
/// component. Cells are half-open (lower edges inclusive).
struct Region {
  std::size_t component = 0;
  std::size_t param_dim = 0;
  std::array<double, kMaxAmbientDim> lo{};
  std::array<double, kMaxAmbientDim> hi{};
  double measure = 0.0;
};

/// Finite partition of A into almost clopen cells: angular bins on curves,
/// equal-area (z, longitude) cells on the sphere, axis-aligned cells on
/// intervals, cubes and the torus chart.
class RegionPartition {
 public:
  /// `bins` gives the cell count per chart axis; a single entry applies to all axes.
  static RegionPartition grid(const EmbeddedSet& set, std::vector<std::size_t> bins);
  static RegionPartition whole(const EmbeddedSet& set) { return grid(set, {1}); }

  const EmbeddedSet& set() const { return set_; }
  std::span<const Region> regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }
  const Region& operator[](std::size_t i) const { return regions_.at(i); }
  double total_measure() const;

  /// Deterministic owner cell of a point on A.
  std::size_t locate(const Point& p) const;

 private:
  EmbeddedSet set_;
  std::vector<std::size_t> first_;  // first region index per component
  std::vector<std::vector<std::size_t>> bins_;  // per component, per axis
  std::vector<Region> regions_;
};

using ScalarFn = std::function<double(const Point&)>;

struct IntegrationOptions {
  double rel_tol = 1e-10;
  /// Points where the integrand may blow up; curve integrals are split there.
  std::vector<Point> singular_points;
  std::size_t mc_strata_per_axis = 16;
  std::size_t mc_samples_per_stratum = 16;
  std::uint64_t mc_seed = 0x5eedULL;
};

struct IntegralResult {
  double value = 0.0;
  /// Quadrature error estimate, or Monte Carlo standard error.
  double error = 0.0;
  bool monte_carlo = false;
};

/// Integral of f against H_d over one region: tanh-sinh quadrature on curves
/// and intervals, stratified Monte Carlo on surfaces and cubes.
/// Throws Divergence when the integrand is not integrable to within tolerance.
IntegralResult region_integral(const EmbeddedSet& set, const ScalarFn& f,
                               const Region& region,
                               const IntegrationOptions& opts = {});

/// Integral of f over all of A (sum over components).
IntegralResult integral(const EmbeddedSet& set, const ScalarFn& f,
                        const IntegrationOptions& opts = {});

}  // namespace riesz
