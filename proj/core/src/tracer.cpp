#include "th/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "th/error.hpp"
#include "th/ode.hpp"
#include "th/parallel.hpp"

namespace th {

namespace {

enum class Kind { Regular, Max, Min };

struct Sample {
  double t = 0.0;
  Point x{};
  double z = 0.0;
  double lz = 0.0;  // forward derivative of z along the flow
  Kind kind = Kind::Regular;
};

class Tracer {
 public:
  Tracer(const Scene& scene, const TraceOptions& options)
      : scene_(scene),
        options_(options),
        dim_(scene.dimension()),
        diameter_(scene.bbox().diameter(scene.dimension())) {}

  TrajectoryRecord run(const Point& seed) {
    const double contact = scene_.tol().contact;
    if (!(scene_.z_at(seed) <= contact))
      throw Error(ErrorKind::Domain, "seed lies outside X (z > tol.contact)");

    const double speed = norm(scene_.field(seed));
    if (!(speed > 0.0)) throw Error(ErrorKind::Scene, "field vanishes at the seed");
    OdeOptions opts;
    opts.rel = scene_.tol().ode_rel;
    opts.abs = scene_.tol().ode_abs;
    opts.h_max = 0.01 * diameter_ / speed;
    h0_ = opts.h_max;

    forward_ = std::make_unique<DormandPrince>([this](const Point& p) { return scene_.field(p); },
                                               dim_, opts);
    backward_ = std::make_unique<DormandPrince>(
        [this](const Point& p) { return -1.0 * scene_.field(p); }, dim_, opts);

    std::vector<Sample> back = integrate(seed, *backward_, -1.0);
    std::vector<Sample> fwd = integrate(seed, *forward_, 1.0);
    std::vector<Sample> samples(back.rbegin(), back.rend());
    samples.push_back(make_sample(0.0, seed));
    samples.insert(samples.end(), fwd.begin(), fwd.end());
    std::size_t seed_index = back.size();

    samples = insert_extrema(samples, seed_index);
    return assemble(samples, seed_index, seed);
  }

 private:
  Sample make_sample(double t, const Point& x) const {
    Sample s;
    s.t = t;
    s.x = x;
    s.z = scene_.z_at(x);
    s.lz = scene_.lie_value(1, x);
    return s;
  }

  std::vector<Sample> integrate(const Point& seed, const DormandPrince& ode, double direction) {
    const double contact = scene_.tol().contact;
    const Box& box = scene_.bbox();
    const double cap = options_.arc_cap_factor * diameter_;
    std::vector<Sample> out;
    Point x = seed;
    double t = 0.0;
    double h = h0_;
    double arc = 0.0;
    for (;;) {
      const auto step = ode.step(x, h, h0_);
      arc += distance(step.x, x);
      x = step.x;
      t += step.h;
      h = step.h_next;
      out.push_back(make_sample(direction * t, x));
      const double z = out.back().z;
      if (z > contact) break;
      if (!box.contains(x, dim_))
        throw Error(ErrorKind::EscapedBbox, "trajectory left the bbox inside X");
      if (arc > cap)
        throw Error(ErrorKind::NonTraversing,
                    "trajectory arc length exceeds " + std::to_string(options_.arc_cap_factor) +
                        " bbox diameters");
    }
    return out;
  }

  /// Bisection in time on the sign of g between samples a and b. Returns
  /// the bracket end states; `left` keeps the sign of g at a.
  template <class G>
  std::pair<Sample, Sample> bisect(const Sample& a, const Sample& b, G g) const {
    Sample lo = a;
    Sample hi = b;
    const bool sign_lo = g(lo) > 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo.t + hi.t);
      if (!(mid > lo.t && mid < hi.t)) break;
      Sample m = make_sample(mid, forward_->advance(lo.x, mid - lo.t));
      if ((g(m) > 0.0) == sign_lo) {
        lo = m;
      } else {
        hi = m;
      }
    }
    return {lo, hi};
  }

  /// Adds refined local extrema of z between consecutive samples and labels
  /// samples where the derivative vanishes exactly.
  std::vector<Sample> insert_extrema(const std::vector<Sample>& in, std::size_t& seed_index) const {
    std::vector<Sample> out;
    std::size_t new_seed = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      Sample s = in[i];
      if (s.lz == 0.0 && i > 0 && i + 1 < in.size()) {
        if (in[i - 1].lz > 0.0 && in[i + 1].lz < 0.0) s.kind = Kind::Max;
        if (in[i - 1].lz < 0.0 && in[i + 1].lz > 0.0) s.kind = Kind::Min;
      }
      if (i == seed_index) new_seed = out.size();
      out.push_back(s);
      if (i + 1 == in.size()) break;
      const Sample& a = in[i];
      const Sample& b = in[i + 1];
      const bool is_max = a.lz > 0.0 && b.lz < 0.0;
      const bool is_min = a.lz < 0.0 && b.lz > 0.0;
      if (!is_max && !is_min) continue;
      auto [lo, hi] = bisect(a, b, [](const Sample& q) { return q.lz; });
      Sample e = std::abs(lo.lz) <= std::abs(hi.lz) ? lo : hi;
      if (e.t <= a.t || e.t >= b.t) continue;
      e.kind = is_max ? Kind::Max : Kind::Min;
      out.push_back(e);
    }
    seed_index = new_seed;
    return out;
  }

  TrajectoryRecord assemble(const std::vector<Sample>& s, std::size_t seed_index,
                            const Point& seed) const {
    const double contact = scene_.tol().contact;
    const double cluster = scene_.tol().cluster;

    // The trajectory through the seed ends where z first exceeds the shell.
    std::size_t lo = seed_index;
    while (lo > 0 && s[lo - 1].z <= contact) --lo;
    std::size_t hi = seed_index;
    while (hi + 1 < s.size() && s[hi + 1].z <= contact) ++hi;

    std::size_t first = s.size();
    std::size_t last = s.size();
    for (std::size_t i = lo; i <= hi; ++i)
      if (s[i].z <= 0.0) {
        if (first == s.size()) first = i;
        last = i;
      }

    TrajectoryRecord rec;
    rec.seed = seed;

    auto singleton_at = [&](const Point& p) {
      rec.divisor.singleton = true;
      rec.divisor.contacts = {classify_contact(scene_, p)};
      rec.polyline = {p};
    };

    auto lowest = [&]() {
      std::size_t best = seed_index;
      for (std::size_t i = lo; i <= hi; ++i)
        if (s[i].z < s[best].z || (s[i].z == s[best].z && s[i].kind == Kind::Min)) best = i;
      return s[best].x;
    };

    if (first == s.size()) {
      singleton_at(lowest());
    } else {
      auto z_of = [](const Sample& q) { return q.z; };
      Sample entry = s[first];
      if (first > 0 && s[first - 1].z > 0.0) entry = bisect(s[first - 1], s[first], z_of).second;
      Sample exit = s[last];
      if (last + 1 < s.size() && s[last + 1].z > 0.0) exit = bisect(s[last], s[last + 1], z_of).first;

      if (distance(entry.x, exit.x) <= cluster) {
        singleton_at(lowest());
      } else {
        std::vector<Point> contacts{entry.x};
        rec.polyline.push_back(entry.x);
        for (std::size_t i = first; i <= last; ++i) {
          if (s[i].t > entry.t && s[i].t < exit.t) rec.polyline.push_back(s[i].x);
          if (s[i].kind != Kind::Max || i == first || i == last) continue;
          if (s[i].z < -contact || s[i].z > contact) continue;
          if (distance(s[i].x, entry.x) <= cluster || distance(s[i].x, exit.x) <= cluster) continue;
          if (distance(s[i].x, contacts.back()) <= cluster) continue;
          contacts.push_back(s[i].x);
        }
        contacts.push_back(exit.x);
        rec.polyline.push_back(exit.x);
        for (const Point& p : contacts) rec.divisor.contacts.push_back(classify_contact(scene_, p));
      }
    }

    rec.omega = omega_of(rec.divisor);
    rec.margin = rec.divisor.contacts.front().margin;
    for (const auto& c : rec.divisor.contacts) rec.margin = std::min(rec.margin, c.margin);
    return rec;
  }

  const Scene& scene_;
  TraceOptions options_;
  std::size_t dim_;
  double diameter_;
  double h0_ = 0.0;
  std::unique_ptr<DormandPrince> forward_;
  std::unique_ptr<DormandPrince> backward_;
};

}  // namespace

TrajectoryRecord trace(const Scene& scene, const Point& seed, const TraceOptions& options) {
  return Tracer(scene, options).run(seed);
}

std::vector<TrajectoryRecord> trace_batch(const Scene& scene, const std::vector<Point>& seeds,
                                          const TraceOptions& options) {
  return parallel_map<TrajectoryRecord>(seeds.size(),
                                        [&](std::size_t i) { return trace(scene, seeds[i], options); });
}

OmegaType omega_of(const Divisor& d) {
  OmegaType w;
  for (const auto& c : d.contacts) w.push_back(c.multiplicity);
  return w;
}

Norms norms(const OmegaType& w) {
  Norms n;
  for (int e : w) {
    n.norm += e;
    n.reduced += e - 1;
  }
  return n;
}

Norms gamma_multiplicities(const Divisor& d) {
  Norms n;
  for (const auto& c : d.contacts) {
    n.norm += c.multiplicity;
    n.reduced += c.multiplicity - 1;
  }
  return n;
}

bool check_parity(const OmegaType& w) {
  if (w.empty()) return false;
  if (w.size() == 1) return w[0] % 2 == 0 && w[0] > 0;
  if (w.front() % 2 == 0 || w.back() % 2 == 0) return false;
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (w[i] % 2 != 0) return false;
  return true;
}

bool check_parity(const Divisor& d) {
  const OmegaType w = omega_of(d);
  if (d.singleton != (w.size() == 1)) return false;
  return check_parity(w);
}

std::string omega_string(const OmegaType& w) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  os << ')';
  return os.str();
}

Json to_json(const Divisor& d, std::size_t dim) {
  Json contacts = Json::array();
  for (const auto& c : d.contacts) contacts.push_back(to_json(c, dim));
  return Json{{"contacts", contacts}, {"singleton", d.singleton}};
}

Json to_json(const TrajectoryRecord& r, std::size_t dim, bool with_polyline) {
  Json j{{"divisor", to_json(r.divisor, dim)},
         {"omega", r.omega},
         {"seed", point_json(r.seed, dim)},
         {"margin", round12(r.margin)},
         {"parity_ok", check_parity(r.divisor)}};
  if (with_polyline) {
    Json poly = Json::array();
    for (const Point& p : r.polyline) poly.push_back(point_json(p, dim));
    j["polyline"] = poly;
  }
  return j;
}

std::vector<Point> boundary_seeds(const Scene& scene, std::size_t k) {
  std::vector<Point> seeds;
  if (scene.dimension() == 2) {
    for (const auto& curve : extract_boundary_curves(scene))
      for (std::size_t i = 0; i < k; ++i) {
        Point p = curve.at(curve.length * (static_cast<double>(i) + 0.5) / static_cast<double>(k));
        project_to_boundary(scene, p, scene.tol().contact / 10.0);
        seeds.push_back(p);
      }
  } else {
    for (const auto& b : stratum_sample_3d(scene, k)) seeds.push_back(b.coords);
  }
  return seeds;
}

}  // namespace th
