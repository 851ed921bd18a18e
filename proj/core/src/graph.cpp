#include "th/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace th {

std::pair<int, int> betti_gf2(const Multigraph& g) {
  const std::size_t words = (g.vertex_count + 63) / 64;
  std::vector<std::vector<std::uint64_t>> cols;
  for (const auto& [u, v] : g.edges) {
    std::vector<std::uint64_t> c(words, 0);
    c[u / 64] ^= std::uint64_t{1} << (u % 64);
    c[v / 64] ^= std::uint64_t{1} << (v % 64);
    cols.push_back(std::move(c));
  }
  // Gaussian elimination on columns.
  int rank = 0;
  std::vector<bool> used(cols.size(), false);
  for (std::size_t row = 0; row < g.vertex_count; ++row) {
    const std::size_t w = row / 64;
    const std::uint64_t bit = std::uint64_t{1} << (row % 64);
    std::size_t pivot = cols.size();
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (!used[c] && (cols[c][w] & bit)) {
        pivot = c;
        break;
      }
    if (pivot == cols.size()) continue;
    used[pivot] = true;
    ++rank;
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (c != pivot && (cols[c][w] & bit))
        for (std::size_t k = 0; k < words; ++k) cols[c][k] ^= cols[pivot][k];
  }
  return {static_cast<int>(g.vertex_count) - rank, static_cast<int>(g.edges.size()) - rank};
}

int component_count(const Multigraph& g) {
  std::vector<std::size_t> parent(g.vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int count = static_cast<int>(g.vertex_count);
  for (const auto& [u, v] : g.edges) {
    const std::size_t a = find(u), b = find(v);
    if (a != b) {
      parent[a] = b;
      --count;
    }
  }
  return count;
}

std::vector<int> degree_sequence(const Multigraph& g) {
  std::vector<int> deg(g.vertex_count, 0);
  for (const auto& [u, v] : g.edges) {
    ++deg[u];
    ++deg[v];
  }
  std::sort(deg.begin(), deg.end());
  return deg;
}

namespace {

std::vector<std::vector<int>> multiplicity_matrix(const Multigraph& g) {
  std::vector<std::vector<int>> m(g.vertex_count, std::vector<int>(g.vertex_count, 0));
  for (const auto& [u, v] : g.edges) {
    ++m[u][v];
    if (u != v) ++m[v][u];
  }
  return m;
}

bool extend(std::size_t i, const std::vector<std::vector<int>>& a,
            const std::vector<std::vector<int>>& b, const std::vector<int>& deg_a,
            const std::vector<int>& deg_b, std::vector<std::size_t>& map, std::vector<bool>& taken) {
  const std::size_t n = a.size();
  if (i == n) return true;
  for (std::size_t j = 0; j < n; ++j) {
    if (taken[j] || deg_a[i] != deg_b[j] || a[i][i] != b[j][j]) continue;
    bool ok = true;
    for (std::size_t k = 0; k < i && ok; ++k) ok = a[i][k] == b[j][map[k]];
    if (!ok) continue;
    map[i] = j;
    taken[j] = true;
    if (extend(i + 1, a, b, deg_a, deg_b, map, taken)) return true;
    taken[j] = false;
  }
  return false;
}

}  // namespace

bool isomorphic(const Multigraph& a, const Multigraph& b) {
  if (a.vertex_count != b.vertex_count || a.edges.size() != b.edges.size()) return false;
  if (degree_sequence(a) != degree_sequence(b)) return false;
  auto deg = [](const Multigraph& g) {
    std::vector<int> d(g.vertex_count, 0);
    for (const auto& [u, v] : g.edges) {
      ++d[u];
      ++d[v];
    }
    return d;
  };
  std::vector<std::size_t> map(a.vertex_count);
  std::vector<bool> taken(a.vertex_count, false);
  return extend(0, multiplicity_matrix(a), multiplicity_matrix(b), deg(a), deg(b), map, taken);
}

std::string to_dot(const Multigraph& g, const std::string& name) {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (std::size_t v = 0; v < g.vertex_count; ++v) {
    os << "  v" << v;
    if (v < g.vertex_labels.size()) os << " [label=\"" << g.vertex_labels[v] << "\"]";
    os << ";\n";
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    os << "  v" << g.edges[e].first << " -- v" << g.edges[e].second;
    if (e < g.edge_labels.size()) os << " [label=\"" << g.edge_labels[e] << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace th
