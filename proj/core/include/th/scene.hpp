#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "th/expr.hpp"
#include "th/geometry.hpp"
#include "th/json_util.hpp"

namespace th {

struct ToleranceSet {
  double regularity = 1e-6;  // minimum |grad z| on the boundary shell
  double contact = 1e-6;     // |z| threshold for a boundary contact
  double deriv_zero = 1e-6;  // |L_v^(k) z| at or below this counts as zero
  double ode_rel = 1e-10;
  double ode_abs = 1e-12;
  double cluster = 1e-5;     // point-matching radius for class identity
  int grid = 0;              // validation samples per axis; 0 picks 64 (2D) or 32 (3D)

  /// Throws Error(Scene) unless every field is strictly positive,
  /// deriv_zero < 1 and contact < the bounding-box diameter.
  void check(double bbox_diameter) const;
};

/// A flow problem: X = {z <= 0} inside bbox, the field v and a Lyapunov
/// candidate f. The tower of iterated Lie derivatives of z is built once at
/// construction up to order dimension + 1; higher orders are computed on
/// demand and cached.
class Scene {
 public:
  Scene(std::size_t dimension, Expression z, std::vector<Expression> v, Expression f, Box bbox,
        ToleranceSet tol = {}, std::optional<std::vector<int>> reference_betti = std::nullopt);

  std::size_t dimension() const { return dim_; }
  const Expression& z() const { return z_; }
  const std::vector<Expression>& v() const { return v_; }
  const Expression& f() const { return f_; }
  const Box& bbox() const { return bbox_; }
  const ToleranceSet& tol() const { return tol_; }
  const std::optional<std::vector<int>>& reference_betti() const { return reference_betti_; }
  int grid() const;

  Scene with_tolerances(const ToleranceSet& tol) const;

  Point field(const Point& p) const;
  double z_at(const Point& p) const { return evaluate(z_, p); }
  double f_at(const Point& p) const { return evaluate(f_, p); }
  Point grad_z(const Point& p) const;
  Point grad_f(const Point& p) const;
  /// Gradient of L_v z, used for Newton refinement onto the tangency locus.
  Point grad_lz(const Point& p) const;

  /// L_v^(j) z evaluated at p; j = 0 is z itself.
  double lie_value(std::size_t j, const Point& p) const;

  /// [z, L_v z, ..., L_v^(order) z].
  std::vector<Expression> lie_tower(std::size_t order) const;

 private:
  struct TowerCache;

  std::size_t dim_;
  Expression z_;
  std::vector<Expression> v_;
  Expression f_;
  Box bbox_;
  ToleranceSet tol_;
  std::optional<std::vector<int>> reference_betti_;
  std::vector<Expression> grad_z_;
  std::vector<Expression> grad_f_;
  std::vector<Expression> grad_lz_;
  std::vector<Expression> base_tower_;
  std::shared_ptr<TowerCache> cache_;
};

/// Sum_i v_i * dg/dx_i, simplified.
Expression lie_derivative(const Scene& scene, const Expression& g);

inline std::vector<Expression> lie_tower(const Scene& scene, std::size_t order) {
  return scene.lie_tower(order);
}

struct ValidationReport {
  bool passed = false;
  double lyapunov_min = 0.0;   // min L_v f over grid nodes of X and shell roots
  double regularity_min = 0.0; // min |grad z| over shell samples
  double speed_min = 0.0;      // min |v| over all bbox grid nodes
  bool containment_ok = false; // z > tol.contact on every bbox-face node
  bool nonempty = false;       // some grid node has z < 0
  std::size_t interior_nodes = 0;
  std::size_t shell_samples = 0;
  std::vector<std::string> failures;
};

/// Grid-based check of the standing hypotheses. Never throws on a bad scene;
/// failures are listed in the report.
ValidationReport validate(const Scene& scene);

Json to_json(const ValidationReport& report);

Scene scene_from_json(const Json& j);
Json scene_to_json(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);

}  // namespace th
