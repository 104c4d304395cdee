#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riesz/geometry.hpp"
#include "riesz/point.hpp"
#include "riesz/weights.hpp"

namespace riesz {

struct Provenance {
  std::uint64_t seed = 0;
  std::string generator = "manual";
};

/// N points on a catalog set. Construction checks membership within
/// 1e-10 * diam(A); distinctness is checked when an energy is evaluated.
class Configuration {
 public:
  Configuration(std::shared_ptr<const EmbeddedSet> set, std::vector<Point> points,
                Provenance provenance = {});

  const EmbeddedSet& set() const { return *set_; }
  const std::shared_ptr<const EmbeddedSet>& set_ptr() const { return set_; }
  std::span<const Point> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const Provenance& provenance() const { return provenance_; }

  /// Pair-distance floor below which points count as coincident.
  double distance_floor() const;

 private:
  std::shared_ptr<const EmbeddedSet> set_;
  std::vector<Point> points_;
  Provenance provenance_;
};

struct EnergyReport {
  double total = 0.0;
  std::vector<double> per_point;  // U_i = sum_{j != i} w(x_i, x_j) / |x_i - x_j|^s
  double min_pair_distance = 0.0;
  double max_pair_distance = 0.0;
};

/// Knobs shared by the raw pair kernels. Energies do not depend on `workers`
/// (every row is reduced on its own and rows are combined in index order);
/// gradients are bit-stable for a fixed worker count.
struct PairOptions {
  double distance_floor = 0.0;
  unsigned workers = 1;
};

/// r^(-s) from r^2, with fast paths for small integer s.
class InversePower {
 public:
  explicit InversePower(double s);
  double operator()(double r2) const;
  double exponent() const { return s_; }

 private:
  double s_;
  int mode_;
};

/// E = sum_{i<j} (w(x_i,x_j) + w(x_j,x_i)) |x_i - x_j|^(-s), compensated.
/// Returns nullopt when a pair falls below the distance floor.
std::optional<double> try_energy_total(std::span<const Point> pts, double s, const WeightFn& w,
                                       const PairOptions& opts);

/// Ambient gradient dE/dx_i; requires a symmetric, differentiable weight.
std::vector<Point> energy_gradient(std::span<const Point> pts, double s, const WeightFn& w,
                                   const PairOptions& opts);

/// Per-point potential U(y) = sum_j w(y, x_j) / |y - x_j|^s over the given
/// points, skipping index `skip` (pass pts.size() to keep all).
double point_potential(const Point& y, std::span<const Point> pts, std::size_t skip, double s,
                       const WeightFn& w);

/// Weighted Riesz s-energy with per-point potentials and pair-distance extremes.
/// Throws CoincidentPoints when a pair is closer than 1e-14 * diam(A).
EnergyReport energy(const Configuration& config, double s, const WeightFn& w,
                    unsigned workers = 1);

/// Gradient of the energy at each point in ambient coordinates.
std::vector<Point> gradient(const Configuration& config, double s, const WeightFn& w,
                            unsigned workers = 1);

/// Energy of gamma * config under w = power_zero_weight(origin, t). Verifies
/// E(gamma w) = gamma^(t - s) E(w) to relative 1e-12 and throws otherwise.
double scaled_energy(const Configuration& config, double gamma, double s, const WeightFn& w);

}  // namespace riesz
