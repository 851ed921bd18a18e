#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "th/graph.hpp"
#include "th/scene.hpp"
#include "th/strata.hpp"
#include "th/tracer.hpp"

namespace th {

/// One point of the trajectory space, identified by its contact set.
struct TrajectoryClass {
  std::size_t id = 0;
  OmegaType omega;
  TrajectoryRecord representative;
  std::vector<BoundaryPoint> contacts;  // the fiber of the origami map over this class
  int cell = -1;                        // owning cell in exact_2d mode
};

/// A piece of a boundary curve between consecutive cut points, [s0, s1]
/// in arclength with s1 possibly past the curve length (wrap-around).
struct Arc {
  std::size_t curve = 0;
  double s0 = 0.0;
  double s1 = 0.0;
  bool closed = false;    // whole curve, no cut points
  int start_vertex = -1;  // 0-cell at s0
  int end_vertex = -1;    // 0-cell at s1
  int cell = -1;
};

struct Cell {
  std::size_t id = 0;
  int dim = 0;
  OmegaType omega;
  std::vector<std::size_t> classes;
  std::vector<std::size_t> arcs;      // 1-cells: boundary arcs folded onto this cell
  std::vector<std::size_t> vertices;  // 1-cells: bounding 0-cells (one entry for a loop)
  bool virtual_vertex = false;        // 0-cell added to close a family without endpoints
};

enum class ComplexMode { Exact2d, Sampled3d };

struct QuotientComplex {
  ComplexMode mode = ComplexMode::Exact2d;
  std::size_t dimension = 2;
  std::vector<TrajectoryClass> classes;
  std::vector<Cell> cells;
  std::vector<Arc> arcs;
  std::vector<BoundaryCurve> curves;
  Multigraph graph;                      // vertices = 0-cells, edges = 1-cells
  std::vector<std::size_t> vertex_cell;  // graph vertex -> cell id
  std::vector<std::size_t> edge_cell;    // graph edge -> cell id
  int grid = 0;
  std::size_t samples_per_arc = 0;
  std::size_t boundary_samples = 0;  // sampled_3d
};

struct ComplexOptions {
  int grid = 0;                   // marching-squares resolution; 0 uses the scene default
  std::size_t samples_per_arc = 8;
  std::size_t samples_3d = 2000;
  std::uint64_t seed = 1;
};

QuotientComplex build_complex_2d(const Scene& scene, const ComplexOptions& options = {});
QuotientComplex build_complex_3d(const Scene& scene, const ComplexOptions& options = {});
QuotientComplex build_complex(const Scene& scene, const ComplexOptions& options = {});

/// True if the two contact lists agree pointwise within radius.
bool same_contacts(const std::vector<BoundaryPoint>& a, const std::vector<BoundaryPoint>& b,
                   double radius);

struct GammaResult {
  std::size_t class_id = 0;
  int cell = -1;
  bool exact = false;      // contact set matched a stored class within tol.cluster
  double distance = 0.0;   // largest contact displacement to the chosen class
  TrajectoryRecord trace;
};

/// Image of a point of X (boundary or interior) in the trajectory space.
/// A stored class with the same contact set is returned when there is one;
/// otherwise the nearest class of the same cell (exact_2d) or the same
/// multiplicity word (sampled_3d). Throws Error(UnmatchedClass) when
/// neither exists.
GammaResult gamma_map(const Scene& scene, const QuotientComplex& complex, const Point& p);

struct StratumBound {
  int stratum = 0;   // j: contacts on the closed stratum of order j, + side
  int bound = 0;
  int observed = 0;
};

struct FiberStatistics {
  std::map<int, int> fiber_histogram;  // |contacts| -> class count
  std::map<int, int> plus_histogram;   // |contacts on the + boundary| -> class count
  int max_fiber = 0;
  int max_plus = 0;
  int fiber_bound = 0;  // dimension + 1
  int plus_bound = 0;   // dimension
  std::vector<StratumBound> strata;
  std::vector<std::string> violations;
};

FiberStatistics fiber_statistics(const QuotientComplex& complex);

/// Classes with a contact on the closed + stratum of order k.
std::vector<std::size_t> filtration(const QuotientComplex& complex, int k);

/// (b0, b1) of the quotient graph. Throws Error(Unsupported) in sampled_3d.
std::vector<int> betti(const QuotientComplex& complex);

Json to_json(const FiberStatistics& stats);
Json to_json(const QuotientComplex& complex);

}  // namespace th
