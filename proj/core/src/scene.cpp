#include "th/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "th/error.hpp"

namespace th {

struct Scene::TowerCache {
  std::mutex mutex;
  std::vector<Expression> tower;
};

void ToleranceSet::check(double bbox_diameter) const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw Error(ErrorKind::Scene, std::string("tolerance ") + name + " must be > 0");
  };
  positive(regularity, "regularity");
  positive(contact, "contact");
  positive(deriv_zero, "deriv_zero");
  positive(ode_rel, "ode_rel");
  positive(ode_abs, "ode_abs");
  positive(cluster, "cluster");
  if (grid < 0) throw Error(ErrorKind::Scene, "tolerance grid must be >= 0");
  if (!(deriv_zero < 1.0)) throw Error(ErrorKind::Scene, "tolerance deriv_zero must be < 1");
  if (!(contact < bbox_diameter))
    throw Error(ErrorKind::Scene, "tolerance contact must be smaller than the bbox diameter");
}

Expression lie_derivative(const Scene& scene, const Expression& g) {
  Expression sum = Expression::constant(0.0);
  for (std::size_t i = 0; i < scene.dimension(); ++i)
    sum = sum + scene.v()[i] * differentiate(g, i);
  return simplify(sum);
}

namespace {

std::vector<Expression> gradient(const Expression& e, std::size_t dim) {
  std::vector<Expression> g;
  g.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) g.push_back(differentiate(e, i));
  return g;
}

Point eval_vector(const std::vector<Expression>& comps, const Point& p) {
  Point out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < comps.size(); ++i) out[i] = evaluate(comps[i], p);
  return out;
}

}  // namespace

Scene::Scene(std::size_t dimension, Expression z, std::vector<Expression> v, Expression f, Box bbox,
             ToleranceSet tol, std::optional<std::vector<int>> reference_betti)
    : dim_(dimension),
      z_(simplify(z)),
      v_(std::move(v)),
      f_(simplify(f)),
      bbox_(bbox),
      tol_(tol),
      reference_betti_(std::move(reference_betti)),
      cache_(std::make_shared<TowerCache>()) {
  if (dim_ != 2 && dim_ != 3) throw Error(ErrorKind::Scene, "dimension must be 2 or 3");
  if (v_.size() != dim_)
    throw Error(ErrorKind::Scene, "field has " + std::to_string(v_.size()) +
                                      " components, expected " + std::to_string(dim_));
  for (auto& c : v_) c = simplify(c);
  auto bound_ok = [&](const Expression& e) { return e.variable_bound() <= dim_; };
  if (!bound_ok(z_) || !bound_ok(f_) || !std::all_of(v_.begin(), v_.end(), bound_ok))
    throw Error(ErrorKind::Scene, "expression references a coordinate beyond the dimension");
  for (std::size_t i = 0; i < dim_; ++i)
    if (!(bbox_.min[i] < bbox_.max[i])) throw Error(ErrorKind::Scene, "bbox min must be < max");
  tol_.check(bbox_.diameter(dim_));

  base_tower_.push_back(z_);
  for (std::size_t j = 1; j <= dim_ + 1; ++j)
    base_tower_.push_back(lie_derivative(*this, base_tower_.back()));
  grad_z_ = gradient(z_, dim_);
  grad_f_ = gradient(f_, dim_);
  grad_lz_ = gradient(base_tower_[1], dim_);
}

int Scene::grid() const {
  if (tol_.grid > 0) return tol_.grid;
  return dim_ == 2 ? 64 : 32;
}

Scene Scene::with_tolerances(const ToleranceSet& tol) const {
  Scene copy = *this;
  tol.check(bbox_.diameter(dim_));
  copy.tol_ = tol;
  return copy;
}

Point Scene::field(const Point& p) const { return eval_vector(v_, p); }
Point Scene::grad_z(const Point& p) const { return eval_vector(grad_z_, p); }
Point Scene::grad_f(const Point& p) const { return eval_vector(grad_f_, p); }
Point Scene::grad_lz(const Point& p) const { return eval_vector(grad_lz_, p); }

double Scene::lie_value(std::size_t j, const Point& p) const {
  if (j < base_tower_.size()) return evaluate(base_tower_[j], p);
  return evaluate(lie_tower(j)[j], p);
}

std::vector<Expression> Scene::lie_tower(std::size_t order) const {
  if (order < base_tower_.size())
    return {base_tower_.begin(), base_tower_.begin() + static_cast<std::ptrdiff_t>(order + 1)};
  std::lock_guard lock(cache_->mutex);
  if (cache_->tower.empty()) cache_->tower = base_tower_;
  while (cache_->tower.size() <= order)
    cache_->tower.push_back(lie_derivative(*this, cache_->tower.back()));
  return {cache_->tower.begin(), cache_->tower.begin() + static_cast<std::ptrdiff_t>(order + 1)};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

/// Visits every node of a (grid+1)^dim lattice over the box.
template <class F>
void for_each_node(const Box& box, std::size_t dim, int grid, F&& fn) {
  const int n = grid + 1;
  const int nz = dim == 3 ? n : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Point p{0.0, 0.0, 0.0};
        const int idx[3] = {i, j, k};
        bool on_face = false;
        for (std::size_t a = 0; a < dim; ++a) {
          p[a] = box.min[a] + (box.max[a] - box.min[a]) * idx[a] / grid;
          if (idx[a] == 0 || idx[a] == grid) on_face = true;
        }
        fn(p, idx, on_face);
      }
}

Point bisect_zero(const Scene& scene, Point inside, Point outside) {
  for (int it = 0; it < 60; ++it) {
    const Point mid = 0.5 * (inside + outside);
    if (scene.z_at(mid) <= 0.0) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return 0.5 * (inside + outside);
}

}  // namespace

ValidationReport validate(const Scene& scene) {
  ValidationReport r;
  const std::size_t dim = scene.dimension();
  const int grid = scene.grid();
  const auto& tol = scene.tol();
  const double inf = std::numeric_limits<double>::infinity();
  r.lyapunov_min = inf;
  r.regularity_min = inf;
  r.speed_min = inf;
  r.containment_ok = true;

  const int n = grid + 1;
  const std::size_t total = dim == 3 ? std::size_t(n) * n * n : std::size_t(n) * n;
  std::vector<double> zs(total, 0.0);
  std::vector<Point> ps(total);
  auto flat = [&](const int idx[3]) {
    return std::size_t(idx[0]) + std::size_t(n) * (std::size_t(idx[1]) + std::size_t(n) * idx[2]);
  };

  try {
    auto lyapunov = [&](const Point& p) {
      const Point v = scene.field(p);
      const Point g = scene.grad_f(p);
      return dot(v, g);
    };

    for_each_node(scene.bbox(), dim, grid, [&](const Point& p, const int idx[3], bool on_face) {
      const double z = scene.z_at(p);
      const std::size_t k = flat(idx);
      zs[k] = z;
      ps[k] = p;
      r.speed_min = std::min(r.speed_min, norm(scene.field(p)));
      if (on_face && !(z > tol.contact)) r.containment_ok = false;
      if (z < 0.0) r.nonempty = true;
      if (z <= 0.0) {
        ++r.interior_nodes;
        r.lyapunov_min = std::min(r.lyapunov_min, lyapunov(p));
      }
      if (std::abs(z) <= tol.contact) {
        ++r.shell_samples;
        r.regularity_min = std::min(r.regularity_min, norm(scene.grad_z(p)));
      }
    });

    // Boundary crossings along lattice edges, refined by bisection.
    for_each_node(scene.bbox(), dim, grid, [&](const Point&, const int idx[3], bool) {
      const std::size_t k = flat(idx);
      for (std::size_t a = 0; a < dim; ++a) {
        if (idx[a] == grid) continue;
        int nb[3] = {idx[0], idx[1], idx[2]};
        ++nb[a];
        const std::size_t m = flat(nb);
        const bool in_k = zs[k] <= 0.0;
        const bool in_m = zs[m] <= 0.0;
        if (in_k == in_m) continue;
        const Point root = in_k ? bisect_zero(scene, ps[k], ps[m]) : bisect_zero(scene, ps[m], ps[k]);
        ++r.shell_samples;
        r.regularity_min = std::min(r.regularity_min, norm(scene.grad_z(root)));
        r.lyapunov_min = std::min(r.lyapunov_min, lyapunov(root));
      }
    });
  } catch (const Error& e) {
    r.failures.push_back(std::string("evaluation failed: ") + e.what());
  }

  if (!r.nonempty) r.failures.push_back("domain {z <= 0} has no interior grid node");
  if (!r.containment_ok)
    r.failures.push_back("domain reaches the bbox walls (z <= tol.contact on a bbox face)");
  if (r.shell_samples == 0) {
    r.failures.push_back("regularity: no boundary samples found");
  } else if (!(r.regularity_min > tol.regularity)) {
    r.failures.push_back("regularity: |grad z| <= tol.regularity on the boundary shell");
  }
  if (r.interior_nodes > 0 && !(r.lyapunov_min > 0.0))
    r.failures.push_back("lyapunov: L_v f <= 0 somewhere in X");
  if (!(r.speed_min > 0.0)) r.failures.push_back("field vanishes inside the bbox");

  for (double* x : {&r.lyapunov_min, &r.regularity_min, &r.speed_min})
    if (std::isinf(*x)) *x = 0.0;
  r.passed = r.failures.empty();
  return r;
}

Json to_json(const ValidationReport& r) {
  return Json{{"passed", r.passed},
              {"lyapunov_min", round12(r.lyapunov_min)},
              {"regularity_min", round12(r.regularity_min)},
              {"speed_min", round12(r.speed_min)},
              {"containment_ok", r.containment_ok},
              {"nonempty", r.nonempty},
              {"interior_nodes", r.interior_nodes},
              {"shell_samples", r.shell_samples},
              {"failures", r.failures}};
}

// ---------------------------------------------------------------------------
// Scene files

Scene scene_from_json(const Json& j) {
  try {
    const std::size_t dim = j.at("dimension").get<std::size_t>();
    if (dim != 2 && dim != 3) throw Error(ErrorKind::Scene, "dimension must be 2 or 3");
    Expression z = parse(j.at("z").get<std::string>(), dim);
    std::vector<Expression> v;
    for (const auto& c : j.at("v")) v.push_back(parse(c.get<std::string>(), dim));
    Expression f = parse(j.at("f").get<std::string>(), dim);
    Box box;
    const auto& jmin = j.at("bbox").at("min");
    const auto& jmax = j.at("bbox").at("max");
    if (jmin.size() != dim || jmax.size() != dim)
      throw Error(ErrorKind::Scene, "bbox corners must have `dimension` coordinates");
    box.min = point_from_json(jmin);
    box.max = point_from_json(jmax);

    ToleranceSet tol;
    if (j.contains("tol")) {
      const auto& t = j.at("tol");
      tol.regularity = t.value("regularity", tol.regularity);
      tol.contact = t.value("contact", tol.contact);
      tol.deriv_zero = t.value("deriv_zero", tol.deriv_zero);
      tol.ode_rel = t.value("ode_rel", tol.ode_rel);
      tol.ode_abs = t.value("ode_abs", tol.ode_abs);
      tol.cluster = t.value("cluster", tol.cluster);
      tol.grid = t.value("grid", tol.grid);
    }
    std::optional<std::vector<int>> betti;
    if (j.contains("reference_betti") && !j.at("reference_betti").is_null())
      betti = j.at("reference_betti").get<std::vector<int>>();
    return Scene(dim, z, v, f, box, tol, betti);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Scene, std::string("malformed scene: ") + e.what());
  }
}

Json scene_to_json(const Scene& s) {
  Json v = Json::array();
  for (const auto& c : s.v()) v.push_back(to_string(c));
  const auto& t = s.tol();
  Json j{{"dimension", s.dimension()},
         {"z", to_string(s.z())},
         {"v", v},
         {"f", to_string(s.f())},
         {"bbox", {{"min", point_json(s.bbox().min, s.dimension())},
                   {"max", point_json(s.bbox().max, s.dimension())}}},
         {"tol", {{"regularity", t.regularity},
                  {"contact", t.contact},
                  {"deriv_zero", t.deriv_zero},
                  {"ode_rel", t.ode_rel},
                  {"ode_abs", t.ode_abs},
                  {"cluster", t.cluster},
                  {"grid", s.grid()}}}};
  if (s.reference_betti()) j["reference_betti"] = *s.reference_betti();
  return j;
}

Scene load_scene(const std::filesystem::path& path) { return scene_from_json(read_json_file(path)); }

}  // namespace th
