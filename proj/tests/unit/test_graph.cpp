#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "th/graph.hpp"

using namespace th;

namespace {

Multigraph random_multigraph(std::mt19937_64& rng) {
  Multigraph g;
  g.vertex_count = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
  const std::size_t e = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
  std::uniform_int_distribution<std::size_t> v(0, g.vertex_count - 1);
  for (std::size_t i = 0; i < e; ++i) g.edges.emplace_back(v(rng), v(rng));
  return g;
}

int union_find_components(const Multigraph& g) {
  std::vector<std::size_t> parent(g.vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : g.edges) parent[find(a)] = find(b);
  int n = 0;
  for (std::size_t i = 0; i < g.vertex_count; ++i) n += find(i) == i;
  return n;
}

Multigraph relabel(const Multigraph& g, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(g.vertex_count);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Multigraph h;
  h.vertex_count = g.vertex_count;
  for (auto [a, b] : g.edges) {
    if (rng() % 2) std::swap(a, b);
    h.edges.emplace_back(perm[a], perm[b]);
  }
  std::shuffle(h.edges.begin(), h.edges.end(), rng);
  return h;
}

}  // namespace

TEST_CASE("hand-computed Betti numbers") {
  Multigraph path{2, {{0, 1}}, {}, {}};
  CHECK(betti_gf2(path) == std::pair{1, 0});
  Multigraph cycle{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {}, {}};
  CHECK(betti_gf2(cycle) == std::pair{1, 1});
  Multigraph doubled{4, {{0, 1}, {0, 1}, {0, 2}, {1, 3}}, {}, {}};
  CHECK(betti_gf2(doubled) == std::pair{1, 1});
  Multigraph loop{1, {{0, 0}}, {}, {}};
  CHECK(betti_gf2(loop) == std::pair{1, 1});
  Multigraph two{4, {{0, 1}, {2, 3}}, {}, {}};
  CHECK(betti_gf2(two) == std::pair{2, 0});
}

TEST_CASE("Betti numbers agree with union-find and the Euler characteristic") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const Multigraph g = random_multigraph(rng);
    const int b0 = union_find_components(g);
    const auto [c0, c1] = betti_gf2(g);
    CHECK(c0 == b0);
    CHECK(component_count(g) == b0);
    CHECK(c1 == static_cast<int>(g.edges.size()) - static_cast<int>(g.vertex_count) + b0);
  }
}

TEST_CASE("isomorphism survives relabeling and detects edits") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const Multigraph g = random_multigraph(rng);
    const Multigraph h = relabel(g, rng);
    CHECK(isomorphic(g, h));
    CHECK(degree_sequence(g) == degree_sequence(h));
    Multigraph k = h;
    k.edges.emplace_back(0, 0);
    CHECK_FALSE(isomorphic(g, k));
  }
  // Same degree sequence, different shape: a 6-cycle against two triangles.
  Multigraph hexagon{6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}, {}, {}};
  Multigraph triangles{6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}, {}, {}};
  CHECK(degree_sequence(hexagon) == degree_sequence(triangles));
  CHECK_FALSE(isomorphic(hexagon, triangles));
}

TEST_CASE("DOT output lists every edge") {
  Multigraph g{3, {{0, 1}, {1, 2}, {1, 2}}, {"a", "b", "c"}, {"e0", "e1", "e2"}};
  const std::string dot = to_dot(g, "G");
  CHECK(dot.find("graph G") != std::string::npos);
  std::size_t edges = 0;
  for (std::size_t pos = dot.find("--"); pos != std::string::npos; pos = dot.find("--", pos + 2)) ++edges;
  CHECK(edges == 3);
  CHECK(dot.find("e2") != std::string::npos);
}
