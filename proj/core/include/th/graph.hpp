#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace th {

/// Undirected multigraph; loops and parallel edges are allowed.
struct Multigraph {
  std::size_t vertex_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::string> vertex_labels;  // optional, used by DOT output
  std::vector<std::string> edge_labels;    // optional
};

/// (b0, b1) over GF(2) from the rank of the vertex-edge incidence matrix.
std::pair<int, int> betti_gf2(const Multigraph& g);

/// Number of connected components by union-find.
int component_count(const Multigraph& g);

std::vector<int> degree_sequence(const Multigraph& g);  // sorted ascending, a loop counts 2

/// Structural isomorphism ignoring labels, by backtracking over vertex
/// bijections with degree pruning.
bool isomorphic(const Multigraph& a, const Multigraph& b);

std::string to_dot(const Multigraph& g, const std::string& name = "T");

}  // namespace th
