#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "th/geometry.hpp"
#include "th/json_util.hpp"
#include "th/scene.hpp"

namespace th {

/// A classified boundary contact.
struct BoundaryPoint {
  Point coords{0.0, 0.0, 0.0};
  int multiplicity = 1;  // smallest j >= 1 with |L_v^(j) z| > tol.deriv_zero
  int side = 1;          // sign of L_v^(j) z
  double fval = 0.0;
  double margin = 0.0;   // |L_v^(j) z|, the decisive derivative magnitude
  bool deep = false;     // j = dimension + 1 (accepted in dimension 3 only)
};

/// Membership in the locus {L_v z >= 0} of the boundary: every point of
/// multiplicity >= 2 plus the simple points where the flow exits.
inline bool on_plus_boundary(const BoundaryPoint& p) {
  return p.multiplicity >= 2 || p.side > 0;
}

/// Membership in the closed stratum where the tower vanishes through order
/// k - 1 and L_v^(k) z >= 0.
inline bool on_plus_stratum(const BoundaryPoint& p, int k) {
  return p.multiplicity > k || (p.multiplicity == k && p.side > 0);
}

struct Multiplicity {
  int multiplicity = 0;
  int side = 0;
};

/// Throws Error(Domain) if |z(p)| > tol.contact, Error(DegenerateContact)
/// if the tower vanishes through order dimension + 1 or (in dimension 2)
/// first becomes nonzero at order 3.
Multiplicity multiplicity_at(const Scene& scene, const Point& p);

/// Classification without the shell precondition; used on contacts the
/// tracer has already accepted.
BoundaryPoint classify_contact(const Scene& scene, const Point& p);

Json to_json(const BoundaryPoint& p, std::size_t dim);

/// Newton projection along grad z onto {z = 0}. Returns false if it fails
/// to converge to |z| <= tolerance.
bool project_to_boundary(const Scene& scene, Point& p, double tolerance, int max_iter = 60);

/// A closed boundary component of a planar domain, as a projected polyline
/// oriented with X on its left.
struct BoundaryCurve {
  std::vector<Point> points;
  std::vector<double> arclength;  // cumulative, size points.size() + 1
  double length = 0.0;

  Point at(double s) const;  // linear interpolation, s taken modulo length

  struct Location {
    double s = 0.0;
    double distance = 0.0;
  };
  Location locate(const Point& p) const;
};

/// Marching squares on a grid x grid lattice over the bbox, each vertex
/// projected to |z| < tol.contact / 10. Throws Error(CurveExtraction) when
/// the level set touches the bbox.
std::vector<BoundaryCurve> extract_boundary_curves(const Scene& scene, int grid = 0);

struct TangencyPoint {
  BoundaryPoint point;
  std::size_t curve = 0;
  double s = 0.0;
};

/// Roots of L_v z along the boundary curves, refined to |L_v z| < 1e-10,
/// ordered by (curve, arclength).
std::vector<TangencyPoint> locate_tangencies(const Scene& scene,
                                             const std::vector<BoundaryCurve>& curves);

/// All isolated points of {z = 0, L_v z = 0} of a planar scene.
std::vector<BoundaryPoint> tangency_locus_2d(const Scene& scene);

/// Random boundary samples of a 3D scene, plus refinements of the
/// near-tangent ones onto {z = 0, L_v z = 0}. Sorted lexicographically.
std::vector<BoundaryPoint> stratum_sample_3d(const Scene& scene, std::size_t count,
                                             std::uint64_t seed = 1);

}  // namespace th
