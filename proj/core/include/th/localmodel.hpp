#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "th/expr.hpp"
#include "th/json_util.hpp"
#include "th/scene.hpp"
#include "th/tracer.hpp"

namespace th {

/// Polynomial normal form of a trajectory of type omega:
///   P(u, x) = prod_i [ (u - i)^w_i + sum_{l=0}^{w_i-2} x_{i,l} (u - i)^l ],  i = 1..len(w).
///
/// Coefficients x_{i,l} are ordered by (i, l) and become the coordinates
/// x1, x2, ... of the model scene; u is x0. At most two coefficients are
/// free (ambient dimension <= 3). With `truncate` set, any further
/// coefficients are frozen at their given values; otherwise a model that
/// needs more than two is rejected with Error(DimensionCap).
struct LocalModel {
  OmegaType omega;
  std::map<std::pair<int, int>, double> coefficients;  // (i, l) -> value; missing means 0
  bool truncate = false;
  double coefficient_halfwidth = 0.1;

  double coefficient(int i, int l) const;
  std::pair<double, double> u_window() const;  // [0, len + 1]
};

/// Coefficient indices (i, l) in coordinate order.
std::vector<std::pair<int, int>> coefficient_order(const OmegaType& omega);

/// Number of coefficients that become coordinates (capped at 2).
std::size_t free_coefficients(const LocalModel& m);

/// Ambient dimension of the model scene: 1 + free coefficients, at least 2.
std::size_t model_dimension(const LocalModel& m);

/// P(u, c) with every coefficient at its value; an expression in x0 only.
Expression build_polynomial(const LocalModel& m);

/// P with the free coefficients as coordinates x1, x2 and the rest frozen.
Expression chart_polynomial(const LocalModel& m);

/// z = chart polynomial, v = d/du, f = u, bbox = u_window times a box of
/// half-width coefficient_halfwidth around the given coefficients.
Scene model_scene(const LocalModel& m, const ToleranceSet& tol = {});

/// Every trajectory on the u-line through the given coefficient point,
/// ordered by u.
std::vector<TrajectoryRecord> trajectories_on_line(const Scene& scene, const Point& base);

struct PerturbationResult {
  Point offset{0.0, 0.0, 0.0};
  std::vector<OmegaType> omegas;
  int total_multiplicity = 0;
  bool ok = true;
};

struct RoundtripReport {
  OmegaType omega;
  std::size_t dimension = 0;
  bool truncated = false;
  std::vector<OmegaType> origin_omegas;
  bool origin_ok = false;
  double margin = 0.0;  // smallest decisive derivative over every traced contact
  std::vector<PerturbationResult> perturbations;
  bool passed = false;
  std::vector<std::string> failures;
};

/// Traces the model at the coefficient origin and at every offset in
/// {-eps, 0, eps}^k (k free coefficients, origin excluded).
RoundtripReport roundtrip(const OmegaType& omega, double epsilon = 1e-2, bool truncate = true);

Json to_json(const RoundtripReport& report);

/// Parses "1,2,1" or "(1,2,1)".
OmegaType parse_omega(const std::string& text);

}  // namespace th
