#include "th/holo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "th/error.hpp"
#include "th/parallel.hpp"

namespace th {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

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
    parent[a] = b;
  }
  std::vector<std::size_t> parent;
};

std::vector<BoundaryPoint> kept_contacts(const TrajectoryRecord& rec, bool strict_plus) {
  std::vector<BoundaryPoint> out;
  for (const auto& c : rec.divisor.contacts)
    if (!strict_plus || on_plus_boundary(c)) out.push_back(c);
  return out;
}

}  // namespace

BoundaryData extract_boundary_data(const Scene& scene, const ExtractOptions& options) {
  const double cluster = scene.tol().cluster;
  const double proj_tol = scene.tol().contact / 10.0;
  BoundaryData data;
  data.dimension = scene.dimension();
  data.strict_plus = options.strict_plus;

  std::vector<Point> seeds;
  if (scene.dimension() == 2) {
    const auto curves = extract_boundary_curves(scene);
    for (const auto& t : locate_tangencies(scene, curves)) seeds.push_back(t.point.coords);
    for (const auto& curve : curves)
      for (std::size_t i = 0; i < options.per_curve; ++i) {
        Point p = curve.at(curve.length * static_cast<double>(i) / static_cast<double>(options.per_curve));
        project_to_boundary(scene, p, proj_tol);
        seeds.push_back(p);
      }
  } else {
    for (const auto& b : stratum_sample_3d(scene, options.shell_samples, options.seed))
      seeds.push_back(b.coords);
  }
  const auto traces = trace_batch(scene, seeds);

  std::vector<std::vector<BoundaryPoint>> seen;
  std::set<std::pair<std::size_t, std::size_t>> relations;
  for (const auto& rec : traces) {
    bool duplicate = false;
    for (const auto& s : seen)
      if (same_contacts(s, rec.divisor.contacts, cluster)) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    seen.push_back(rec.divisor.contacts);

    // Nearby contacts of different trajectories stay separate samples: near
    // a tangency one end of a trajectory moves much less than the other.
    std::vector<std::size_t> ids;
    for (const auto& c : kept_contacts(rec, options.strict_plus)) {
      ids.push_back(data.samples.size());
      data.samples.push_back({ids.back(), c.coords, scene.f_at(c.coords)});
    }
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        if (ids[a] != ids[b]) relations.insert({ids[a], ids[b]});
  }
  data.relations.assign(relations.begin(), relations.end());
  return data;
}

Json to_json(const BoundaryData& data) {
  Json samples = Json::array();
  for (const auto& s : data.samples)
    samples.push_back({{"id", s.id}, {"coords", point_json(s.coords, data.dimension)}, {"f", round12(s.f)}});
  Json relations = Json::array();
  for (const auto& [i, j] : data.relations) relations.push_back({i, j});
  return Json{{"dimension", data.dimension},
              {"strict_plus", data.strict_plus},
              {"samples", samples},
              {"relations", relations}};
}

BoundaryData boundary_data_from_json(const Json& j) {
  try {
    BoundaryData data;
    data.dimension = j.value("dimension", std::size_t{2});
    data.strict_plus = j.value("strict_plus", false);
    for (const auto& s : j.at("samples"))
      data.samples.push_back({s.at("id").get<std::size_t>(), point_from_json(s.at("coords")),
                              s.at("f").get<double>()});
    for (const auto& r : j.at("relations"))
      data.relations.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
    for (std::size_t i = 0; i < data.samples.size(); ++i)
      if (data.samples[i].id != i)
        throw Error(ErrorKind::Parse, "boundary samples must have ids 0..n-1 in order");
    return data;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed boundary data: ") + e.what());
  }
}

std::vector<std::string> check_order_axioms(const BoundaryData& data) {
  std::vector<std::string> out;
  const std::size_t n = data.samples.size();
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [i, j] : data.relations) {
    const std::string tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
    if (i >= n || j >= n) {
      out.push_back("relation " + tag + " names an unknown sample");
      continue;
    }
    if (i == j) out.push_back("reflexive relation " + tag);
    const double fi = data.samples[i].f;
    const double fj = data.samples[j].f;
    if (fj < fi || (fj == fi && j < i)) out.push_back("relation " + tag + " decreases f");
    pairs.insert({i, j});
  }
  for (const auto& [i, j] : pairs)
    if (i < j && pairs.count({j, i}))
      out.push_back("antisymmetry fails for samples " + std::to_string(i) + " and " + std::to_string(j));

  // Acyclicity by Kahn's algorithm.
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& [i, j] : pairs)
    if (i != j) {
      succ[i].push_back(j);
      ++indeg[j];
    }
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::size_t removed = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.front();
    ready.pop();
    ++removed;
    for (std::size_t w : succ[u])
      if (--indeg[w] == 0) ready.push(w);
  }
  if (removed != n) out.push_back("relations contain a cycle");

  // Each comparability class must be a chain.
  UnionFind uf(n);
  for (const auto& [i, j] : pairs) uf.unite(i, j);
  std::vector<std::size_t> size(n, 0), related(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++size[uf.find(i)];
  std::set<std::pair<std::size_t, std::size_t>> unordered;
  for (const auto& [i, j] : pairs)
    if (i != j) unordered.insert({std::min(i, j), std::max(i, j)});
  for (const auto& [i, j] : unordered) ++related[uf.find(i)];
  for (std::size_t r = 0; r < n; ++r)
    if (size[r] > 1 && related[r] != size[r] * (size[r] - 1) / 2)
      out.push_back("class of sample " + std::to_string(r) + " is not a chain");
  return out;
}

namespace {

Reconstruction build_reconstruction(const BoundaryData& data) {
  const std::size_t n = data.samples.size();
  Reconstruction rec;
  rec.dimension = data.dimension;
  UnionFind uf(n);
  for (const auto& [i, j] : data.relations)
    if (i < n && j < n) uf.unite(i, j);

  std::vector<std::size_t> class_of_root(n, npos);
  rec.class_of.assign(n, npos);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (class_of_root[r] == npos) {
      class_of_root[r] = rec.classes.size();
      ReconstructedClass c;
      c.id = rec.classes.size();
      rec.classes.push_back(c);
    }
    rec.class_of[i] = class_of_root[r];
    rec.classes[class_of_root[r]].samples.push_back(i);
  }
  for (auto& c : rec.classes) {
    std::sort(c.samples.begin(), c.samples.end(), [&](std::size_t a, std::size_t b) {
      const double fa = data.samples[a].f, fb = data.samples[b].f;
      return fa != fb ? fa < fb : a < b;
    });
    c.lo = data.samples[c.samples.front()].f;
    c.hi = data.samples[c.samples.back()].f;
  }

  if (data.dimension != 2 || data.strict_plus || n < 3) return rec;

  // Curve neighbours of every sample: the nearest one, and the nearest on
  // the opposite side of it.
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = data.samples[i].coords;
    std::size_t first = npos;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = distance(p, data.samples[j].coords);
      if (d < best) {
        best = d;
        first = j;
      }
    }
    links.emplace_back(i, first);
    const Point dir = data.samples[first].coords - p;
    std::size_t second = npos;
    best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Point q = data.samples[j].coords - p;
      if (dot(q, dir) >= 0.0) continue;
      const double d = norm(q);
      if (d < best) {
        best = d;
        second = j;
      }
    }
    if (second != npos) links.emplace_back(i, second);
  }

  const auto is_family = [&](std::size_t cls) { return rec.classes[cls].samples.size() == 2; };
  UnionFind fam(rec.classes.size());
  for (const auto& [a, b] : links) {
    const std::size_t ca = rec.class_of[a], cb = rec.class_of[b];
    if (is_family(ca) && is_family(cb)) fam.unite(ca, cb);
  }

  Multigraph g;
  std::vector<std::size_t> vertex_of_class(rec.classes.size(), npos);
  for (const auto& c : rec.classes)
    if (!is_family(c.id)) {
      vertex_of_class[c.id] = g.vertex_count++;
      rec.vertex_class.push_back(c.id);
    }

  std::vector<std::size_t> roots;
  for (const auto& c : rec.classes)
    if (is_family(c.id) && fam.find(c.id) == c.id) roots.push_back(c.id);
  std::vector<std::set<std::size_t>> ends(rec.classes.size());
  for (const auto& [a, b] : links) {
    const std::size_t ca = rec.class_of[a], cb = rec.class_of[b];
    if (is_family(ca) && !is_family(cb)) ends[fam.find(ca)].insert(vertex_of_class[cb]);
    if (is_family(cb) && !is_family(ca)) ends[fam.find(cb)].insert(vertex_of_class[ca]);
  }
  for (std::size_t r : roots) {
    std::vector<std::size_t> v(ends[r].begin(), ends[r].end());
    if (v.size() > 2)
      throw Error(ErrorKind::InconsistentQuotient,
                  "reconstructed family touches more than two singular classes");
    if (v.empty()) {
      v.push_back(g.vertex_count++);
      rec.vertex_class.push_back(npos);
    }
    g.edges.emplace_back(v.front(), v.back());
  }
  rec.graph = g;
  return rec;
}

struct Assignment {
  std::size_t class_id = npos;
  double d = std::numeric_limits<double>::infinity();
};

/// Reconstructed class whose samples lie closest to every contact.
Assignment assign_class(const BoundaryData& data, const Reconstruction& rec,
                        const std::vector<BoundaryPoint>& contacts) {
  Assignment best;
  std::set<std::size_t> candidates;
  for (const auto& c : contacts) {
    std::size_t nearest = npos;
    double dn = std::numeric_limits<double>::infinity();
    for (const auto& s : data.samples) {
      const double d = distance(s.coords, c.coords);
      if (d < dn) {
        dn = d;
        nearest = s.id;
      }
    }
    if (nearest != npos) candidates.insert(rec.class_of[nearest]);
  }
  for (std::size_t cls : candidates) {
    double worst = 0.0;
    for (const auto& c : contacts) {
      double dn = std::numeric_limits<double>::infinity();
      for (std::size_t sid : rec.classes[cls].samples)
        dn = std::min(dn, distance(data.samples[sid].coords, c.coords));
      worst = std::max(worst, dn);
    }
    if (worst < best.d) best = {cls, worst};
  }
  return best;
}

}  // namespace

Reconstruction reconstruct(const BoundaryData& data) {
  const auto failures = check_order_axioms(data);
  if (!failures.empty())
    throw Error(ErrorKind::OrderViolation,
                failures.front() + " (" + std::to_string(failures.size()) + " violation(s))");
  return build_reconstruction(data);
}

Json to_json(const Reconstruction& rec) {
  Json classes = Json::array();
  for (const auto& c : rec.classes)
    classes.push_back(
        {{"id", c.id}, {"samples", c.samples}, {"interval", {round12(c.lo), round12(c.hi)}}});
  Json j{{"dimension", rec.dimension}, {"classes", classes}, {"class_count", rec.classes.size()}};
  if (rec.graph) {
    Json edges = Json::array();
    for (const auto& [u, v] : rec.graph->edges) edges.push_back({u, v});
    Json vclass = Json::array();
    for (std::size_t c : rec.vertex_class) vclass.push_back(c == npos ? Json(nullptr) : Json(c));
    const auto [b0, b1] = betti_gf2(*rec.graph);
    j["graph"] = {{"vertices", rec.graph->vertex_count},
                  {"edges", edges},
                  {"vertex_class", vclass},
                  {"betti", {b0, b1}}};
  }
  return j;
}

AlphaResult alpha_embed(const Scene& scene, const QuotientComplex& complex, const Point& p) {
  const GammaResult g = gamma_map(scene, complex, p);
  return {g.class_id, scene.f_at(p)};
}

std::vector<Point> interior_probes(const Scene& scene, std::size_t count, std::uint64_t seed) {
  const std::size_t dim = scene.dimension();
  const Box& box = scene.bbox();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 1000 * count + 1000) {
    ++attempts;
    Point p{};
    for (std::size_t a = 0; a < dim; ++a) p[a] = box.min[a] + (box.max[a] - box.min[a]) * unit(rng);
    if (scene.z_at(p) < -scene.tol().contact) out.push_back(p);
  }
  return out;
}

ReconstructionReport verify_reconstruction(const Scene& scene, const BoundaryData& data,
                                           const VerifyOptions& options) {
  ReconstructionReport report;
  const auto axiom_failures = check_order_axioms(data);
  report.order_axiom_failures = axiom_failures.size();
  if (!axiom_failures.empty()) {
    report.failures = axiom_failures;
    return report;
  }
  Reconstruction rec;
  try {
    rec = build_reconstruction(data);
  } catch (const Error& e) {
    report.failures.push_back(e.what());
    return report;
  }
  report.class_count = rec.classes.size();
  if (data.samples.empty()) {
    report.failures.push_back("no boundary samples");
    return report;
  }

  const double cluster = scene.tol().cluster;
  double lipschitz = 0.0;
  for (const auto& s : data.samples) lipschitz = std::max(lipschitz, norm(scene.grad_f(s.coords)));

  auto classify = [&](const Point& p) -> std::pair<Assignment, TrajectoryRecord> {
    TrajectoryRecord tr = trace(scene, p);
    return {assign_class(data, rec, kept_contacts(tr, data.strict_plus)), tr};
  };

  // (a) interior points land in a class whose interval contains f.
  const auto probes = interior_probes(scene, options.probes, options.seed);
  report.probes = probes.size();
  struct ProbeResult {
    bool ok = false;
    std::string error;
  };
  const auto results = parallel_map<ProbeResult>(probes.size(), [&](std::size_t i) {
    ProbeResult r;
    try {
      const auto [a, tr] = classify(probes[i]);
      if (a.class_id == npos) return r;
      const auto& c = rec.classes[a.class_id];
      const double slack = lipschitz * a.d + cluster;
      const double f = scene.f_at(probes[i]);
      r.ok = f >= c.lo - slack && f <= c.hi + slack;
    } catch (const Error& e) {
      r.error = e.what();
    }
    return r;
  });
  std::size_t accepted = 0;
  for (const auto& r : results) {
    if (r.ok) ++accepted;
    if (!r.error.empty() && report.failures.size() < 10) report.failures.push_back(r.error);
  }
  report.interior_acceptance =
      probes.empty() ? 0.0 : static_cast<double>(accepted) / static_cast<double>(probes.size());

  // (b) every point of a traced leaf maps to the same class.
  const std::size_t leaf_n = std::min(options.leaf_probes, probes.size());
  const auto leaf_ok = parallel_map<char>(leaf_n, [&](std::size_t i) -> char {
    try {
      const auto [a, tr] = classify(probes[i]);
      const auto& poly = tr.polyline;
      if (poly.size() < 3) return 1;
      for (std::size_t k = 1; k <= options.leaf_points; ++k) {
        const std::size_t idx = k * (poly.size() - 1) / (options.leaf_points + 1);
        if (idx == 0 || idx + 1 >= poly.size()) continue;
        if (classify(poly[idx]).first.class_id != a.class_id) return 0;
      }
      return 1;
    } catch (const Error&) {
      return 0;
    }
  });
  report.leaf_checked = leaf_n;
  report.leaf_consistency =
      leaf_n == 0 ? 0.0
                  : static_cast<double>(std::count(leaf_ok.begin(), leaf_ok.end(), char{1})) /
                        static_cast<double>(leaf_n);

  // (c) comparability partition against geometric contact matching.
  if (data.dimension == 2) {
    const auto sample_traces = parallel_map<std::vector<BoundaryPoint>>(
        data.samples.size(), [&](std::size_t i) -> std::vector<BoundaryPoint> {
          try {
            return kept_contacts(trace(scene, data.samples[i].coords), data.strict_plus);
          } catch (const Error&) {
            return {};
          }
        });
    bool match = true;
    std::vector<std::size_t> reps;
    for (const auto& c : rec.classes) {
      const auto& first = sample_traces[c.samples.front()];
      if (first.empty()) match = false;
      for (std::size_t sid : c.samples)
        if (!same_contacts(sample_traces[sid], first, cluster)) match = false;
      for (std::size_t r : reps)
        if (same_contacts(sample_traces[rec.classes[r].samples.front()], first, cluster)) match = false;
      reps.push_back(c.id);
    }
    report.class_count_match = match;
    if (!match) report.failures.push_back("comparability classes differ from traced contact sets");

    if (options.complex && rec.graph) {
      report.graph_isomorphic = isomorphic(*rec.graph, options.complex->graph);
      if (!*report.graph_isomorphic)
        report.failures.push_back("reconstructed graph differs from the quotient complex");
    }
  }
  return report;
}

Json to_json(const ReconstructionReport& r) {
  Json j{{"interior_acceptance", round12(r.interior_acceptance)},
         {"probes", r.probes},
         {"leaf_consistency", round12(r.leaf_consistency)},
         {"leaf_checked", r.leaf_checked},
         {"order_axiom_failures", r.order_axiom_failures},
         {"class_count", r.class_count},
         {"failures", r.failures}};
  j["class_count_match"] = r.class_count_match ? Json(*r.class_count_match) : Json(nullptr);
  j["graph_isomorphic"] = r.graph_isomorphic ? Json(*r.graph_isomorphic) : Json(nullptr);
  return j;
}

}  // namespace th
