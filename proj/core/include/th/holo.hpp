#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "th/graph.hpp"
#include "th/json_util.hpp"
#include "th/scene.hpp"
#include "th/tspace.hpp"

namespace th {

struct BoundarySample {
  std::size_t id = 0;
  Point coords{0.0, 0.0, 0.0};
  double f = 0.0;
};

/// Everything a boundary observer records: sample positions, the values of
/// f there, and the flow order between samples on a common trajectory.
struct BoundaryData {
  std::size_t dimension = 2;
  bool strict_plus = false;  // only samples on the + boundary were kept
  std::vector<BoundarySample> samples;
  std::vector<std::pair<std::size_t, std::size_t>> relations;  // (i, j): j follows i
};

struct ExtractOptions {
  std::size_t per_curve = 256;       // dimension 2
  std::size_t shell_samples = 2000;  // dimension 3
  std::uint64_t seed = 1;
  bool strict_plus = false;
};

/// The only step that looks inside X: traces from dense boundary seeds and
/// records contacts and their order.
BoundaryData extract_boundary_data(const Scene& scene, const ExtractOptions& options = {});

Json to_json(const BoundaryData& data);
BoundaryData boundary_data_from_json(const Json& j);

/// Violations of irreflexivity, antisymmetry, acyclicity, compatibility
/// with f and totality of each comparability class. Empty when valid.
std::vector<std::string> check_order_axioms(const BoundaryData& data);

struct ReconstructedClass {
  std::size_t id = 0;
  std::vector<std::size_t> samples;  // ordered by f, ties by id
  double lo = 0.0;                   // min f
  double hi = 0.0;                   // max f
};

struct Reconstruction {
  std::size_t dimension = 2;
  std::vector<ReconstructedClass> classes;
  std::vector<std::size_t> class_of;  // sample id -> class id
  std::optional<Multigraph> graph;    // dimension 2
  std::vector<std::size_t> vertex_class;  // graph vertex -> class id, or npos for a virtual vertex
};

/// Rebuilds the trajectory space from boundary data alone. Throws
/// Error(OrderViolation) if the data fails the order axioms.
Reconstruction reconstruct(const BoundaryData& data);

Json to_json(const Reconstruction& rec);

struct AlphaResult {
  std::size_t class_id = 0;
  double f = 0.0;
};

/// The point's trajectory class paired with its f-value.
AlphaResult alpha_embed(const Scene& scene, const QuotientComplex& complex, const Point& p);

struct VerifyOptions {
  std::size_t probes = 2000;
  std::size_t leaf_probes = 100;
  std::size_t leaf_points = 5;
  std::uint64_t seed = 7;
  const QuotientComplex* complex = nullptr;  // for the graph comparison in dimension 2
};

struct ReconstructionReport {
  double interior_acceptance = 0.0;
  std::size_t probes = 0;
  double leaf_consistency = 0.0;
  std::size_t leaf_checked = 0;
  std::size_t order_axiom_failures = 0;
  std::optional<bool> class_count_match;  // dimension 2
  std::optional<bool> graph_isomorphic;   // dimension 2 with a complex
  std::size_t class_count = 0;
  std::vector<std::string> failures;
};

/// Checks a reconstruction against the scene it came from. Never throws on
/// bad data; problems are reported.
ReconstructionReport verify_reconstruction(const Scene& scene, const BoundaryData& data,
                                           const VerifyOptions& options = {});

Json to_json(const ReconstructionReport& report);

/// Fixed-seed uniform points with z < -tol.contact.
std::vector<Point> interior_probes(const Scene& scene, std::size_t count, std::uint64_t seed);

}  // namespace th
