#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace th {

/// A point of the ambient space. Scenes have dimension 2 or 3; unused
/// trailing coordinates are kept at zero.
using Point = std::array<double, 3>;

inline constexpr std::size_t kMaxDimension = 3;

inline Point operator+(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Point operator-(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Point operator*(double s, const Point& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

inline Point make_point(std::span<const double> coords) {
  Point p{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < coords.size() && i < kMaxDimension; ++i) p[i] = coords[i];
  return p;
}

inline std::vector<double> to_vector(const Point& p, std::size_t dim) {
  return {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(dim)};
}

/// Axis-aligned box; the realization of the ambient germ around X.
struct Box {
  Point min{0.0, 0.0, 0.0};
  Point max{0.0, 0.0, 0.0};

  bool contains(const Point& p, std::size_t dim) const {
    for (std::size_t i = 0; i < dim; ++i)
      if (p[i] < min[i] || p[i] > max[i]) return false;
    return true;
  }
  double diameter(std::size_t dim) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += (max[i] - min[i]) * (max[i] - min[i]);
    return std::sqrt(s);
  }
};

}  // namespace th
