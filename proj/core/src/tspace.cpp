#include "th/tspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "th/error.hpp"

namespace th {

bool same_contacts(const std::vector<BoundaryPoint>& a, const std::vector<BoundaryPoint>& b,
                   double radius) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (distance(a[i].coords, b[i].coords) > radius) return false;
  return true;
}

namespace {

double contact_distance(const std::vector<BoundaryPoint>& a, const std::vector<BoundaryPoint>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, distance(a[i].coords, b[i].coords));
  return d;
}

struct CurvePosition {
  std::size_t curve = 0;
  double s = 0.0;
  double distance = 0.0;
};

CurvePosition nearest_curve(const std::vector<BoundaryCurve>& curves, const Point& p) {
  CurvePosition best{0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto loc = curves[c].locate(p);
    if (loc.distance < best.distance) best = {c, loc.s, loc.distance};
  }
  return best;
}

std::optional<std::size_t> locate_arc(const QuotientComplex& cx, const Point& p) {
  if (cx.curves.empty()) return std::nullopt;
  const CurvePosition pos = nearest_curve(cx.curves, p);
  const double length = cx.curves[pos.curve].length;
  for (std::size_t a = 0; a < cx.arcs.size(); ++a) {
    const Arc& arc = cx.arcs[a];
    if (arc.curve != pos.curve) continue;
    if (arc.closed) return a;
    if ((pos.s >= arc.s0 && pos.s <= arc.s1) || (pos.s + length >= arc.s0 && pos.s + length <= arc.s1))
      return a;
  }
  return std::nullopt;
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smallest index stays the root
  }
  std::vector<std::size_t> parent;
};

QuotientComplex attempt_2d(const Scene& scene, int grid, std::size_t samples_per_arc) {
  const double cluster = scene.tol().cluster;
  const double proj_tol = scene.tol().contact / 10.0;

  QuotientComplex cx;
  cx.mode = ComplexMode::Exact2d;
  cx.dimension = 2;
  cx.grid = grid;
  cx.samples_per_arc = samples_per_arc;
  cx.curves = extract_boundary_curves(scene, grid);
  const auto tangencies = locate_tangencies(scene, cx.curves);

  std::vector<Point> tangency_seeds;
  for (const auto& t : tangencies) tangency_seeds.push_back(t.point.coords);
  const auto tangency_traces = trace_batch(scene, tangency_seeds);

  // 0-cells: distinct classes through tangency points.
  std::vector<TrajectoryClass> vertex_classes;
  for (const auto& rec : tangency_traces) {
    if (*std::max_element(rec.omega.begin(), rec.omega.end()) < 2) continue;
    bool known = false;
    for (const auto& c : vertex_classes)
      if (same_contacts(c.contacts, rec.divisor.contacts, cluster)) known = true;
    if (known) continue;
    TrajectoryClass c;
    c.id = vertex_classes.size();
    c.omega = rec.omega;
    c.representative = rec;
    c.contacts = rec.divisor.contacts;
    c.cell = static_cast<int>(c.id);
    vertex_classes.push_back(std::move(c));
  }

  // Cut points: every contact of a 0-cell class.
  struct Cut {
    double s;
    Point p;
    int vertex;
  };
  std::vector<std::vector<Cut>> cuts(cx.curves.size());
  for (const auto& c : vertex_classes)
    for (const auto& contact : c.contacts) {
      const CurvePosition pos = nearest_curve(cx.curves, contact.coords);
      bool dup = false;
      for (const auto& existing : cuts[pos.curve])
        if (distance(existing.p, contact.coords) <= cluster) dup = true;
      if (!dup) cuts[pos.curve].push_back({pos.s, contact.coords, static_cast<int>(c.id)});
    }

  for (std::size_t k = 0; k < cx.curves.size(); ++k) {
    auto& list = cuts[k];
    std::sort(list.begin(), list.end(), [](const Cut& a, const Cut& b) { return a.s < b.s; });
    const double length = cx.curves[k].length;
    if (list.empty()) {
      Arc arc;
      arc.curve = k;
      arc.s0 = 0.0;
      arc.s1 = length;
      arc.closed = true;
      cx.arcs.push_back(arc);
      continue;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Cut& a = list[i];
      const Cut& b = list[(i + 1) % list.size()];
      Arc arc;
      arc.curve = k;
      arc.s0 = a.s;
      arc.s1 = i + 1 < list.size() ? b.s : b.s + length;
      arc.start_vertex = a.vertex;
      arc.end_vertex = b.vertex;
      cx.arcs.push_back(arc);
    }
  }

  // Sample every arc and trace.
  std::vector<Point> seeds;
  std::vector<std::size_t> seed_arc;
  for (std::size_t a = 0; a < cx.arcs.size(); ++a) {
    const Arc& arc = cx.arcs[a];
    for (std::size_t j = 0; j < samples_per_arc; ++j) {
      const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(samples_per_arc);
      Point p = cx.curves[arc.curve].at(arc.s0 + u * (arc.s1 - arc.s0));
      project_to_boundary(scene, p, proj_tol);
      seeds.push_back(p);
      seed_arc.push_back(a);
    }
  }
  const auto traces = trace_batch(scene, seeds);

  std::vector<std::vector<std::size_t>> arc_sets(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (const auto& contact : traces[i].divisor.contacts) {
      const auto a = locate_arc(cx, contact.coords);
      if (!a) throw Error(ErrorKind::InconsistentQuotient, "contact off every boundary arc");
      arc_sets[i].push_back(*a);
    }
    std::sort(arc_sets[i].begin(), arc_sets[i].end());
    arc_sets[i].erase(std::unique(arc_sets[i].begin(), arc_sets[i].end()), arc_sets[i].end());
  }
  for (std::size_t i = 1; i < traces.size(); ++i) {
    if (seed_arc[i] != seed_arc[i - 1]) continue;
    if (traces[i].omega != traces[i - 1].omega || arc_sets[i] != arc_sets[i - 1])
      throw Error(ErrorKind::InconsistentQuotient,
                  "traces from one boundary arc disagree (" + omega_string(traces[i - 1].omega) +
                      " vs " + omega_string(traces[i].omega) + ")");
  }

  // Fold arcs whose trajectories are shared into 1-cells.
  UnionFind uf(cx.arcs.size());
  for (const auto& set : arc_sets)
    for (std::size_t a : set) uf.unite(set.front(), a);
  std::vector<std::size_t> roots;
  for (std::size_t a = 0; a < cx.arcs.size(); ++a)
    if (uf.find(a) == a) roots.push_back(a);

  // 0-cells: tangency classes, then one virtual vertex per family without
  // endpoints.
  for (const auto& c : vertex_classes) {
    Cell cell;
    cell.id = cx.cells.size();
    cell.dim = 0;
    cell.omega = c.omega;
    cell.classes = {c.id};
    cx.cells.push_back(cell);
  }
  std::vector<std::vector<std::size_t>> family_vertices(roots.size());
  for (std::size_t r = 0; r < roots.size(); ++r) {
    std::vector<std::size_t> verts;
    for (std::size_t a = 0; a < cx.arcs.size(); ++a) {
      if (uf.find(a) != roots[r] || cx.arcs[a].closed) continue;
      verts.push_back(static_cast<std::size_t>(cx.arcs[a].start_vertex));
      verts.push_back(static_cast<std::size_t>(cx.arcs[a].end_vertex));
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.size() > 2)
      throw Error(ErrorKind::InconsistentQuotient, "a 1-cell has more than two bounding 0-cells");
    if (verts.empty()) {
      Cell cell;
      cell.id = cx.cells.size();
      cell.dim = 0;
      cell.virtual_vertex = true;
      verts.push_back(cell.id);
      cx.cells.push_back(cell);
    }
    family_vertices[r] = verts;
  }
  const std::size_t vertex_count = cx.cells.size();

  std::vector<int> family_cell(cx.arcs.size(), -1);
  for (std::size_t r = 0; r < roots.size(); ++r) {
    Cell cell;
    cell.id = cx.cells.size();
    cell.dim = 1;
    cell.vertices = family_vertices[r];
    for (std::size_t a = 0; a < cx.arcs.size(); ++a)
      if (uf.find(a) == roots[r]) {
        cell.arcs.push_back(a);
        cx.arcs[a].cell = static_cast<int>(cell.id);
      }
    family_cell[roots[r]] = static_cast<int>(cell.id);
    cx.cells.push_back(cell);
  }

  // Classes: 0-cell classes first, then sampled classes in arc order.
  cx.classes = vertex_classes;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const int cell_id = family_cell[uf.find(seed_arc[i])];
    Cell& cell = cx.cells[static_cast<std::size_t>(cell_id)];
    bool merged = false;
    for (std::size_t cid : cell.classes)
      if (same_contacts(cx.classes[cid].contacts, traces[i].divisor.contacts, cluster)) {
        merged = true;
        break;
      }
    if (merged) continue;
    TrajectoryClass c;
    c.id = cx.classes.size();
    c.omega = traces[i].omega;
    c.representative = traces[i];
    c.contacts = traces[i].divisor.contacts;
    c.cell = cell_id;
    if (cell.omega.empty()) cell.omega = c.omega;
    cell.classes.push_back(c.id);
    cx.classes.push_back(std::move(c));
  }

  cx.graph.vertex_count = vertex_count;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    cx.vertex_cell.push_back(v);
    cx.graph.vertex_labels.push_back(cx.cells[v].virtual_vertex ? std::string("*")
                                                                : omega_string(cx.cells[v].omega));
  }
  for (std::size_t id = vertex_count; id < cx.cells.size(); ++id) {
    const Cell& cell = cx.cells[id];
    const std::size_t u = cell.vertices.front();
    const std::size_t w = cell.vertices.back();
    cx.graph.edges.emplace_back(u, w);
    cx.graph.edge_labels.push_back(omega_string(cell.omega));
    cx.edge_cell.push_back(id);
  }
  return cx;
}

}  // namespace

QuotientComplex build_complex_2d(const Scene& scene, const ComplexOptions& options) {
  if (scene.dimension() != 2) throw Error(ErrorKind::Unsupported, "exact complex needs dimension 2");
  const int grid = options.grid > 0 ? options.grid : scene.grid();
  try {
    return attempt_2d(scene, grid, options.samples_per_arc);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InconsistentQuotient) throw;
  }
  return attempt_2d(scene, 2 * grid, 2 * options.samples_per_arc);
}

QuotientComplex build_complex_3d(const Scene& scene, const ComplexOptions& options) {
  if (scene.dimension() != 3) throw Error(ErrorKind::Unsupported, "sampled complex needs dimension 3");
  const double cluster = scene.tol().cluster;
  QuotientComplex cx;
  cx.mode = ComplexMode::Sampled3d;
  cx.dimension = 3;
  cx.grid = options.grid > 0 ? options.grid : scene.grid();

  std::vector<Point> seeds;
  for (const auto& b : stratum_sample_3d(scene, options.samples_3d, options.seed))
    seeds.push_back(b.coords);
  cx.boundary_samples = seeds.size();
  const auto traces = trace_batch(scene, seeds);

  using Key = std::array<long long, 3>;
  std::map<Key, std::vector<std::size_t>> index;
  auto key_of = [&](const Point& p) {
    return Key{static_cast<long long>(std::floor(p[0] / cluster)),
               static_cast<long long>(std::floor(p[1] / cluster)),
               static_cast<long long>(std::floor(p[2] / cluster))};
  };
  for (const auto& rec : traces) {
    const Key k = key_of(rec.divisor.contacts.front().coords);
    bool merged = false;
    for (long long dx = -1; dx <= 1 && !merged; ++dx)
      for (long long dy = -1; dy <= 1 && !merged; ++dy)
        for (long long dz = -1; dz <= 1 && !merged; ++dz) {
          const auto it = index.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == index.end()) continue;
          for (std::size_t cid : it->second)
            if (same_contacts(cx.classes[cid].contacts, rec.divisor.contacts, cluster)) {
              merged = true;
              break;
            }
        }
    if (merged) continue;
    TrajectoryClass c;
    c.id = cx.classes.size();
    c.omega = rec.omega;
    c.representative = rec;
    c.contacts = rec.divisor.contacts;
    index[k].push_back(c.id);
    cx.classes.push_back(std::move(c));
  }
  return cx;
}

QuotientComplex build_complex(const Scene& scene, const ComplexOptions& options) {
  return scene.dimension() == 2 ? build_complex_2d(scene, options) : build_complex_3d(scene, options);
}

GammaResult gamma_map(const Scene& scene, const QuotientComplex& cx, const Point& p) {
  const double cluster = scene.tol().cluster;
  GammaResult out;
  out.trace = trace(scene, p);
  const auto& contacts = out.trace.divisor.contacts;

  for (const auto& c : cx.classes)
    if (same_contacts(c.contacts, contacts, cluster)) {
      out.class_id = c.id;
      out.cell = c.cell;
      out.exact = true;
      out.distance = contact_distance(c.contacts, contacts);
      return out;
    }

  int cell = -1;
  if (cx.mode == ComplexMode::Exact2d) {
    for (const auto& contact : contacts) {
      const auto a = locate_arc(cx, contact.coords);
      if (!a) throw Error(ErrorKind::UnmatchedClass, "contact off every boundary arc");
      const int c = cx.arcs[*a].cell;
      if (cell >= 0 && c != cell)
        throw Error(ErrorKind::UnmatchedClass, "contacts fall on arcs of different 1-cells");
      cell = c;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cx.classes) {
    if (c.omega != out.trace.omega) continue;
    if (cx.mode == ComplexMode::Exact2d && c.cell != cell) continue;
    const double d = contact_distance(c.contacts, contacts);
    if (d < best) {
      best = d;
      out.class_id = c.id;
      out.cell = c.cell;
    }
  }
  if (!std::isfinite(best))
    throw Error(ErrorKind::UnmatchedClass,
                "no class with multiplicity word " + omega_string(out.trace.omega));
  out.distance = best;
  return out;
}

FiberStatistics fiber_statistics(const QuotientComplex& cx) {
  FiberStatistics st;
  const int dim = static_cast<int>(cx.dimension);
  const int n = dim - 1;
  st.fiber_bound = n + 2;
  st.plus_bound = n + 1;
  for (int j = 2; j <= dim; ++j) st.strata.push_back({j, (n + j - 2) / (j - 1), 0});

  for (const auto& c : cx.classes) {
    const int size = static_cast<int>(c.contacts.size());
    const int plus = static_cast<int>(
        std::count_if(c.contacts.begin(), c.contacts.end(), [](const BoundaryPoint& b) {
          return on_plus_boundary(b);
        }));
    ++st.fiber_histogram[size];
    ++st.plus_histogram[plus];
    st.max_fiber = std::max(st.max_fiber, size);
    st.max_plus = std::max(st.max_plus, plus);
    for (auto& sb : st.strata) {
      const int count = static_cast<int>(
          std::count_if(c.contacts.begin(), c.contacts.end(),
                        [&](const BoundaryPoint& b) { return on_plus_stratum(b, sb.stratum); }));
      sb.observed = std::max(sb.observed, count);
    }
  }
  if (st.max_fiber > st.fiber_bound)
    st.violations.push_back("fiber of size " + std::to_string(st.max_fiber) + " exceeds " +
                            std::to_string(st.fiber_bound));
  if (st.max_plus > st.plus_bound)
    st.violations.push_back("+ boundary fiber of size " + std::to_string(st.max_plus) +
                            " exceeds " + std::to_string(st.plus_bound));
  for (const auto& sb : st.strata)
    if (sb.observed > sb.bound)
      st.violations.push_back("stratum " + std::to_string(sb.stratum) + " fiber of size " +
                              std::to_string(sb.observed) + " exceeds " + std::to_string(sb.bound));
  return st;
}

std::vector<std::size_t> filtration(const QuotientComplex& cx, int k) {
  std::vector<std::size_t> out;
  for (const auto& c : cx.classes)
    if (std::any_of(c.contacts.begin(), c.contacts.end(),
                    [&](const BoundaryPoint& b) { return on_plus_stratum(b, k); }))
      out.push_back(c.id);
  return out;
}

std::vector<int> betti(const QuotientComplex& cx) {
  if (cx.mode != ComplexMode::Exact2d)
    throw Error(ErrorKind::Unsupported, "Betti numbers are computed for planar scenes only");
  const auto [b0, b1] = betti_gf2(cx.graph);
  return {b0, b1};
}

Json to_json(const FiberStatistics& st) {
  auto hist = [](const std::map<int, int>& h) {
    Json j = Json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  Json strata = Json::array();
  for (const auto& sb : st.strata)
    strata.push_back({{"stratum", sb.stratum}, {"bound", sb.bound}, {"observed", sb.observed}});
  return Json{{"fiber_histogram", hist(st.fiber_histogram)},
              {"plus_histogram", hist(st.plus_histogram)},
              {"max_fiber", st.max_fiber},
              {"max_plus", st.max_plus},
              {"fiber_bound", st.fiber_bound},
              {"plus_bound", st.plus_bound},
              {"strata", strata},
              {"violations", st.violations}};
}

Json to_json(const QuotientComplex& cx) {
  const std::size_t dim = cx.dimension;
  Json j;
  j["mode"] = cx.mode == ComplexMode::Exact2d ? "exact_2d" : "sampled_3d";
  j["dimension"] = dim;
  j["class_count"] = cx.classes.size();
  if (cx.mode == ComplexMode::Exact2d) {
    Json classes = Json::array();
    for (const auto& c : cx.classes) {
      Json contacts = Json::array();
      for (const auto& b : c.contacts) contacts.push_back(to_json(b, dim));
      classes.push_back({{"id", c.id}, {"omega", c.omega}, {"cell", c.cell}, {"contacts", contacts}});
    }
    j["classes"] = classes;
    Json cells = Json::array();
    Json adjacency = Json::array();
    for (const auto& c : cx.cells) {
      Json cell{{"id", c.id}, {"dim", c.dim}, {"omega", c.omega}, {"classes", c.classes}};
      if (c.virtual_vertex) cell["virtual"] = true;
      if (c.dim == 1) {
        cell["arcs"] = c.arcs;
        adjacency.push_back({{"cell", c.id}, {"vertices", c.vertices}});
      }
      cells.push_back(cell);
    }
    j["cells"] = cells;
    j["adjacency"] = adjacency;
    Json arcs = Json::array();
    for (const auto& a : cx.arcs)
      arcs.push_back({{"curve", a.curve},
                      {"s0", round12(a.s0)},
                      {"s1", round12(a.s1)},
                      {"closed", a.closed},
                      {"start_vertex", a.start_vertex},
                      {"end_vertex", a.end_vertex},
                      {"cell", a.cell}});
    j["arcs"] = arcs;
    Json edges = Json::array();
    for (const auto& [u, v] : cx.graph.edges) edges.push_back({u, v});
    j["graph"] = {{"vertices", cx.graph.vertex_count}, {"edges", edges}};
    j["grid"] = cx.grid;
    j["samples_per_arc"] = cx.samples_per_arc;
  } else {
    std::map<std::string, int> by_omega;
    for (const auto& c : cx.classes) ++by_omega[omega_string(c.omega)];
    j["omega_counts"] = by_omega;
    j["boundary_samples"] = cx.boundary_samples;
  }
  return j;
}

}  // namespace th
