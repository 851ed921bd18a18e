#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "th/expr.hpp"
#include "th/scene.hpp"

namespace th::test {

inline std::string scene_path(const std::string& name) {
  return std::string(TH_SCENES_DIR) + "/" + name + ".json";
}

inline std::string data_path(const std::string& name) {
  return std::string(TH_TEST_DATA_DIR) + "/" + name;
}

inline Scene fixture(const std::string& name) { return load_scene(scene_path(name)); }

inline const std::vector<std::string>& planar_fixtures() {
  static const std::vector<std::string> names{"disk", "disk_horizontal", "disk_tilted",
                                              "annulus", "annulus_tilted", "two_disks"};
  return names;
}

inline const std::vector<std::string>& spatial_fixtures() {
  static const std::vector<std::string> names{"ball", "torus"};
  return names;
}

inline std::vector<std::string> all_fixtures() {
  auto out = planar_fixtures();
  for (const auto& n : spatial_fixtures()) out.push_back(n);
  return out;
}

inline Point uniform_in(const Box& box, std::size_t dim, std::mt19937_64& rng) {
  Point p{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < dim; ++k)
    p[k] = std::uniform_real_distribution<double>(box.min[k], box.max[k])(rng);
  return p;
}

/// k-th iterated directional derivative of z along v by nested central
/// differences: D^k z(p) = (D^(k-1) z(p + t v) - D^(k-1) z(p - t v)) / 2t,
/// with t = h / |v(p)| so each difference moves a distance h.
inline double nested_lie_fd(const Scene& scene, const Point& p, std::size_t k, double h0) {
  if (k == 0) return scene.z_at(p);
  const Point v = scene.field(p);
  double speed = 0.0;
  for (std::size_t i = 0; i < scene.dimension(); ++i) speed += v[i] * v[i];
  const double h = h0 / std::max(std::sqrt(speed), 1e-12);
  Point a = p, b = p;
  for (std::size_t i = 0; i < scene.dimension(); ++i) {
    a[i] += h * v[i];
    b[i] -= h * v[i];
  }
  return (nested_lie_fd(scene, a, k - 1, h0) - nested_lie_fd(scene, b, k - 1, h0)) / (2.0 * h);
}

/// Step for the nested differences of order k: larger orders divide by h^k, so
/// the step grows to keep rounding below truncation.
inline double lie_fd_step(std::size_t k) { return k <= 1 ? 1e-4 : k == 2 ? 3e-4 : 1e-2; }

inline double central_partial(const Expression& e, const Point& p, std::size_t var, double h) {
  Point a = p, b = p;
  a[var] += h;
  b[var] -= h;
  return (evaluate(e, a) - evaluate(e, b)) / (2.0 * h);
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// Captures std::cout for the lifetime of the object.
class CoutCapture {
 public:
  CoutCapture() : old_(std::cout.rdbuf(buffer_.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(old_); }
  std::string text() const { return buffer_.str(); }

 private:
  std::ostringstream buffer_;
  std::streambuf* old_;
};

}  // namespace th::test
