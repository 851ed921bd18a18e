#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "th/geometry.hpp"
#include "th/json_util.hpp"
#include "th/scene.hpp"
#include "th/strata.hpp"

namespace th {

/// Multiplicity word of a trajectory: contact multiplicities in flow order.
using OmegaType = std::vector<int>;

struct Divisor {
  std::vector<BoundaryPoint> contacts;  // increasing f
  bool singleton = false;
};

struct TrajectoryRecord {
  Divisor divisor;
  OmegaType omega;
  Point seed{0.0, 0.0, 0.0};
  std::vector<Point> polyline;  // from the first contact to the last
  double margin = 0.0;          // smallest decisive derivative over contacts
};

struct TraceOptions {
  double arc_cap_factor = 100.0;  // NonTraversing after this many bbox diameters
};

/// Follows the trajectory through seed in both directions and collects its
/// boundary contacts. Requires z(seed) <= tol.contact.
TrajectoryRecord trace(const Scene& scene, const Point& seed, const TraceOptions& options = {});

/// trace() over many seeds in parallel; results keep the seed order.
std::vector<TrajectoryRecord> trace_batch(const Scene& scene, const std::vector<Point>& seeds,
                                          const TraceOptions& options = {});

OmegaType omega_of(const Divisor& d);

struct Norms {
  int norm = 0;     // sum of entries
  int reduced = 0;  // sum of (entry - 1)
  bool operator==(const Norms&) const = default;
};

Norms norms(const OmegaType& w);
Norms gamma_multiplicities(const Divisor& d);

/// Odd first and last entries with even entries between, or a single even
/// entry.
bool check_parity(const OmegaType& w);
bool check_parity(const Divisor& d);

std::string omega_string(const OmegaType& w);  // "(1,2,1)"

Json to_json(const Divisor& d, std::size_t dim);
Json to_json(const TrajectoryRecord& r, std::size_t dim, bool with_polyline = true);

/// Seeds spread over the boundary: k per boundary curve by arclength in
/// dimension 2, k shell samples in dimension 3.
std::vector<Point> boundary_seeds(const Scene& scene, std::size_t k);

}  // namespace th
