#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace riesz {

/// Largest ambient dimension used by the set catalog (the flat torus lives in R^4).
inline constexpr std::size_t kMaxAmbientDim = 4;

/// A point (or displacement) in ambient Euclidean space R^{d'}, d' <= 4.
/// Stored inline so configurations are contiguous and allocation-free.
struct Point {
  std::array<double, kMaxAmbientDim> x{};
  std::size_t dim = 0;

  Point() = default;
  explicit Point(std::size_t d) : dim(d) { assert(d <= kMaxAmbientDim); }
  Point(std::initializer_list<double> coords) : dim(coords.size()) {
    assert(coords.size() <= kMaxAmbientDim);
    std::size_t i = 0;
    for (double c : coords) x[i++] = c;
  }
  static Point from_span(std::span<const double> coords) {
    Point p(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) p.x[i] = coords[i];
    return p;
  }

  double& operator[](std::size_t i) { return x[i]; }
  double operator[](std::size_t i) const { return x[i]; }
  std::size_t size() const { return dim; }
  std::span<const double> coords() const { return {x.data(), dim}; }

  bool is_finite() const {
    for (std::size_t i = 0; i < dim; ++i)
      if (!std::isfinite(x[i])) return false;
    return true;
  }

  Point& operator+=(const Point& o) {
    for (std::size_t i = 0; i < dim; ++i) x[i] += o.x[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (std::size_t i = 0; i < dim; ++i) x[i] -= o.x[i];
    return *this;
  }
  Point& operator*=(double a) {
    for (std::size_t i = 0; i < dim; ++i) x[i] *= a;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double c) { return a *= c; }
  friend Point operator*(double c, Point a) { return a *= c; }
  friend Point operator-(Point a) { return a *= -1.0; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (std::size_t i = 0; i < a.dim; ++i)
      if (a.x[i] != b.x[i]) return false;
    return true;
  }
};

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim; ++i) s += a.x[i] * b.x[i];
  return s;
}

inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline double distance2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim; ++i) {
    const double t = a.x[i] - b.x[i];
    s += t * t;
  }
  return s;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(distance2(a, b));
}

/// Strict lexicographic order on coordinates; used to break ties deterministically.
inline bool lex_less(const Point& a, const Point& b) {
  for (std::size_t i = 0; i < a.dim && i < b.dim; ++i) {
    if (a.x[i] < b.x[i]) return true;
    if (a.x[i] > b.x[i]) return false;
  }
  return a.dim < b.dim;
}

}  // namespace riesz
