#include "th/strata.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "th/error.hpp"
#include "th/parallel.hpp"

namespace th {

BoundaryPoint classify_contact(const Scene& scene, const Point& p) {
  const std::size_t dim = scene.dimension();
  const double zero = scene.tol().deriv_zero;
  for (std::size_t k = 1; k <= dim + 1; ++k) {
    const double value = scene.lie_value(k, p);
    if (std::abs(value) <= zero) continue;
    BoundaryPoint bp;
    bp.coords = p;
    bp.multiplicity = static_cast<int>(k);
    bp.side = value > 0.0 ? 1 : -1;
    bp.fval = scene.f_at(p);
    bp.margin = std::abs(value);
    if (k == dim + 1) {
      if (dim != 3)
        throw Error(ErrorKind::DegenerateContact,
                    "contact of multiplicity " + std::to_string(k) + " exceeds dimension " +
                        std::to_string(dim));
      bp.deep = true;
    }
    return bp;
  }
  throw Error(ErrorKind::DegenerateContact,
              "Lie tower of z vanishes through order " + std::to_string(dim + 1) +
                  " at a boundary point");
}

Multiplicity multiplicity_at(const Scene& scene, const Point& p) {
  if (std::abs(scene.z_at(p)) > scene.tol().contact)
    throw Error(ErrorKind::Domain, "point is not on the boundary shell (|z| > tol.contact)");
  const BoundaryPoint bp = classify_contact(scene, p);
  return {bp.multiplicity, bp.side};
}

Json to_json(const BoundaryPoint& p, std::size_t dim) {
  Json j{{"coords", point_json(p.coords, dim)},
         {"multiplicity", p.multiplicity},
         {"side", p.side},
         {"fval", round12(p.fval)}};
  if (p.deep) j["deep"] = true;
  return j;
}

bool project_to_boundary(const Scene& scene, Point& p, double tolerance, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double z = scene.z_at(p);
    if (std::abs(z) <= tolerance) return true;
    const Point g = scene.grad_z(p);
    const double gg = dot(g, g);
    if (!(gg > 0.0)) return false;
    p = p - (z / gg) * g;
  }
  return std::abs(scene.z_at(p)) <= tolerance;
}

// ---------------------------------------------------------------------------
// Boundary curves

Point BoundaryCurve::at(double s) const {
  if (points.empty()) return {};
  s = std::fmod(s, length);
  if (s < 0.0) s += length;
  const auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - arclength.begin() - 1));
  i = std::min(i, points.size() - 1);
  const Point& a = points[i];
  const Point& b = points[(i + 1) % points.size()];
  const double seg = arclength[i + 1] - arclength[i];
  const double u = seg > 0.0 ? (s - arclength[i]) / seg : 0.0;
  return a + u * (b - a);
}

BoundaryCurve::Location BoundaryCurve::locate(const Point& p) const {
  Location best{0.0, std::numeric_limits<double>::infinity()};
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = points[i];
    const Point d = points[(i + 1) % n] - a;
    const double dd = dot(d, d);
    const double u = dd > 0.0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
    const double dist = distance(p, a + u * d);
    if (dist < best.distance) best = {arclength[i] + u * (arclength[i + 1] - arclength[i]), dist};
  }
  if (best.s >= length) best.s -= length;
  return best;
}

namespace {

void finalize_curve(const Scene& scene, BoundaryCurve& c) {
  // Drop duplicates left by projection.
  std::vector<Point> pts;
  for (const Point& p : c.points)
    if (pts.empty() || distance(pts.back(), p) > 1e-12) pts.push_back(p);
  while (pts.size() > 1 && distance(pts.front(), pts.back()) <= 1e-12) pts.pop_back();

  // Orientation: X on the left means grad z points to the right of the tangent.
  double score = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % pts.size()];
    const Point t = b - a;
    const Point g = scene.grad_z(0.5 * (a + b));
    score += g[0] * (-t[1]) + g[1] * t[0];
  }
  if (score > 0.0) std::reverse(pts.begin(), pts.end());

  const auto first = std::min_element(pts.begin(), pts.end());
  std::rotate(pts.begin(), first, pts.end());

  c.points = std::move(pts);
  c.arclength.assign(1, 0.0);
  for (std::size_t i = 0; i < c.points.size(); ++i)
    c.arclength.push_back(c.arclength.back() +
                          distance(c.points[i], c.points[(i + 1) % c.points.size()]));
  c.length = c.arclength.back();
}

}  // namespace

std::vector<BoundaryCurve> extract_boundary_curves(const Scene& scene, int grid) {
  if (scene.dimension() != 2) throw Error(ErrorKind::Unsupported, "boundary curves need dimension 2");
  if (grid <= 0) grid = scene.grid();
  const Box& box = scene.bbox();
  const int n = grid + 1;
  auto node = [&](int i, int j) {
    return Point{box.min[0] + (box.max[0] - box.min[0]) * i / grid,
                 box.min[1] + (box.max[1] - box.min[1]) * j / grid, 0.0};
  };
  std::vector<double> zs(std::size_t(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double z = scene.z_at(node(i, j));
      zs[std::size_t(j) * n + i] = z;
      const bool face = i == 0 || j == 0 || i == grid || j == grid;
      if (face && z <= 0.0)
        throw Error(ErrorKind::CurveExtraction, "boundary level set touches the bbox");
    }
  auto zat = [&](int i, int j) { return zs[std::size_t(j) * n + i]; };
  auto inside = [&](int i, int j) { return zat(i, j) <= 0.0; };

  // Edge ids: 2*(j*n+i) horizontal from (i,j); +1 vertical from (i,j).
  auto h_edge = [&](int i, int j) { return 2 * (j * n + i); };
  auto v_edge = [&](int i, int j) { return 2 * (j * n + i) + 1; };
  auto edge_point = [&](int id) {
    const int base = id / 2;
    const int i = base % n;
    const int j = base / n;
    const int i2 = (id % 2 == 0) ? i + 1 : i;
    const int j2 = (id % 2 == 0) ? j : j + 1;
    const double za = zat(i, j);
    const double zb = zat(i2, j2);
    const double u = za / (za - zb);
    const Point a = node(i, j);
    return a + u * (node(i2, j2) - a);
  };

  std::vector<std::array<int, 2>> segments;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      const bool c[4] = {inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)};
      const int e[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      std::vector<int> crossing;
      for (int k = 0; k < 4; ++k)
        if (c[k] != c[(k + 1) % 4]) crossing.push_back(e[k]);
      if (crossing.size() == 2) {
        segments.push_back({crossing[0], crossing[1]});
      } else if (crossing.size() == 4) {
        const double center = 0.25 * (zat(i, j) + zat(i + 1, j) + zat(i + 1, j + 1) + zat(i, j + 1));
        if ((center <= 0.0) == c[0]) {
          // Corners 0 and 2 connect through the center; cut off corners 1 and 3.
          segments.push_back({e[0], e[1]});
          segments.push_back({e[2], e[3]});
        } else {
          segments.push_back({e[3], e[0]});
          segments.push_back({e[1], e[2]});
        }
      }
    }

  std::map<int, std::vector<std::size_t>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s)
    for (int e : segments[s]) by_edge[e].push_back(s);

  std::vector<bool> used(segments.size(), false);
  std::vector<BoundaryCurve> curves;
  const double proj_tol = scene.tol().contact / 10.0;
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    BoundaryCurve curve;
    std::size_t seg = start;
    int from = segments[start][0];
    const int origin = from;
    for (;;) {
      used[seg] = true;
      curve.points.push_back(edge_point(from));
      const int to = segments[seg][0] == from ? segments[seg][1] : segments[seg][0];
      if (to == origin) break;
      std::size_t next = seg;
      for (std::size_t cand : by_edge[to])
        if (cand != seg) next = cand;
      if (next == seg || used[next])
        throw Error(ErrorKind::CurveExtraction, "open boundary curve in marching squares");
      seg = next;
      from = to;
    }
    for (Point& p : curve.points)
      if (!project_to_boundary(scene, p, proj_tol))
        throw Error(ErrorKind::CurveExtraction, "projection onto z = 0 failed");
    finalize_curve(scene, curve);
    if (curve.points.size() >= 3) curves.push_back(std::move(curve));
  }
  std::sort(curves.begin(), curves.end(),
            [](const BoundaryCurve& a, const BoundaryCurve& b) { return a.points[0] < b.points[0]; });
  return curves;
}

// ---------------------------------------------------------------------------
// Tangency location

namespace {

/// Newton on (z, L_v z) = 0. In 2D the system is square; in 3D the update
/// is the minimum-norm Gauss-Newton step.
bool polish_tangency(const Scene& scene, Point& p, double max_move) {
  const Point start = p;
  const std::size_t dim = scene.dimension();
  for (int it = 0; it < 40; ++it) {
    const double f0 = scene.z_at(p);
    const double f1 = scene.lie_value(1, p);
    if (std::abs(f0) < 1e-13 && std::abs(f1) < 1e-12) return true;
    const Point g0 = scene.grad_z(p);
    const Point g1 = scene.grad_lz(p);
    // J J^T
    const double a = dot(g0, g0), b = dot(g0, g1), d = dot(g1, g1);
    const double det = a * d - b * b;
    if (!(std::abs(det) > 1e-300)) return false;
    const double y0 = (d * f0 - b * f1) / det;
    const double y1 = (-b * f0 + a * f1) / det;
    Point step = y0 * g0 + y1 * g1;
    if (dim == 2) step[2] = 0.0;
    p = p - step;
    if (distance(p, start) > max_move) return false;
  }
  return std::abs(scene.z_at(p)) < 1e-10 && std::abs(scene.lie_value(1, p)) < 1e-10;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::vector<TangencyPoint> locate_tangencies(const Scene& scene,
                                             const std::vector<BoundaryCurve>& curves) {
  const double proj_tol = scene.tol().contact / 10.0;
  std::vector<TangencyPoint> out;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const BoundaryCurve& curve = curves[c];
    const std::size_t n = curve.points.size();
    std::vector<double> lz(n);
    for (std::size_t i = 0; i < n; ++i) lz[i] = scene.lie_value(1, curve.points[i]);
    const double max_move = 2.0 * (curve.length / static_cast<double>(n));

    std::vector<Point> roots;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = (i + 1) % n;
      if (lz[i] == 0.0) {
        Point q = curve.points[i];
        Point polished = q;
        if (polish_tangency(scene, polished, max_move)) q = polished;
        roots.push_back(q);
        continue;
      }
      if (lz[k] == 0.0 || sign_of(lz[i]) == sign_of(lz[k])) continue;
      const Point a = curve.points[i];
      const Point b = curve.points[k];
      double lo = 0.0, hi = 1.0;
      const int sa = sign_of(lz[i]);
      Point q = a;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        q = a + mid * (b - a);
        project_to_boundary(scene, q, proj_tol);
        if (sign_of(scene.lie_value(1, q)) == sa) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      Point polished = q;
      if (polish_tangency(scene, polished, max_move)) q = polished;
      roots.push_back(q);
    }

    std::vector<TangencyPoint> on_curve;
    for (const Point& r : roots) {
      bool duplicate = false;
      for (const auto& t : on_curve)
        if (distance(t.point.coords, r) <= scene.tol().cluster) duplicate = true;
      if (duplicate) continue;
      TangencyPoint t;
      t.point = classify_contact(scene, r);
      t.curve = c;
      t.s = curve.locate(r).s;
      on_curve.push_back(t);
    }
    std::sort(on_curve.begin(), on_curve.end(),
              [](const TangencyPoint& x, const TangencyPoint& y) { return x.s < y.s; });
    out.insert(out.end(), on_curve.begin(), on_curve.end());
  }
  return out;
}

std::vector<BoundaryPoint> tangency_locus_2d(const Scene& scene) {
  if (scene.dimension() != 2) throw Error(ErrorKind::Unsupported, "tangency_locus_2d needs dimension 2");
  std::vector<BoundaryPoint> out;
  for (const auto& t : locate_tangencies(scene, extract_boundary_curves(scene)))
    out.push_back(t.point);
  return out;
}

std::vector<BoundaryPoint> stratum_sample_3d(const Scene& scene, std::size_t count,
                                             std::uint64_t seed) {
  if (scene.dimension() != 3) throw Error(ErrorKind::Unsupported, "stratum_sample_3d needs dimension 3");
  const Box& box = scene.bbox();
  const double proj_tol = scene.tol().contact / 10.0;
  const double max_move = 0.1 * box.diameter(3);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Each attempt projects a uniform bbox point onto the shell; failures are
  // rejected and redrawn. Candidates are drawn serially for reproducibility.
  std::vector<Point> accepted;
  accepted.reserve(count);
  std::size_t attempts = 0;
  const std::size_t max_attempts = 50 * count + 100;
  while (accepted.size() < count && attempts < max_attempts) {
    const std::size_t batch = std::max<std::size_t>(64, 2 * (count - accepted.size()));
    std::vector<Point> starts(batch);
    for (auto& p : starts)
      for (std::size_t a = 0; a < 3; ++a) p[a] = box.min[a] + (box.max[a] - box.min[a]) * unit(rng);
    attempts += batch;
    std::vector<char> ok(batch, 0);
    parallel_for(batch, [&](std::size_t i) {
      Point p = starts[i];
      if (project_to_boundary(scene, p, proj_tol) && box.contains(p, 3) &&
          norm(scene.grad_z(p)) > scene.tol().regularity) {
        starts[i] = p;
        ok[i] = 1;
      }
    });
    for (std::size_t i = 0; i < batch && accepted.size() < count; ++i)
      if (ok[i]) accepted.push_back(starts[i]);
  }

  struct Classified {
    BoundaryPoint sample;
    bool has_refined = false;
    BoundaryPoint refined;
  };
  auto results = parallel_map<Classified>(accepted.size(), [&](std::size_t i) {
    Classified c;
    const Point p = accepted[i];
    c.sample = classify_contact(scene, p);
    const double lz = scene.lie_value(1, p);
    const double scale = norm(scene.grad_z(p)) * norm(scene.field(p));
    if (std::abs(lz) <= 0.05 * scale) {
      Point q = p;
      if (polish_tangency(scene, q, max_move) && box.contains(q, 3)) {
        c.refined = classify_contact(scene, q);
        c.has_refined = true;
      }
    }
    return c;
  });

  std::vector<BoundaryPoint> out;
  for (const auto& c : results) {
    out.push_back(c.sample);
    if (c.has_refined) out.push_back(c.refined);
  }
  std::sort(out.begin(), out.end(),
            [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.coords < b.coords; });
  return out;
}

}  // namespace th
