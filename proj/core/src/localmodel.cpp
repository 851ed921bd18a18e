#include "th/localmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "th/error.hpp"
#include "th/tspace.hpp"

namespace th {

namespace {

constexpr std::size_t kMaxFree = 2;

void check_admissible(const OmegaType& omega) {
  for (int w : omega)
    if (w < 1) throw Error(ErrorKind::Domain, "multiplicity word entries must be positive");
  if (!check_parity(omega))
    throw Error(ErrorKind::Domain, "multiplicity word " + omega_string(omega) +
                                       " violates the parity law");
}

/// (u - i)^w + sum_l c_l (u - i)^l with c_l either a coordinate or a constant.
Expression factor(const LocalModel& m, int i, const std::vector<std::pair<int, int>>& order,
                  std::size_t free, bool symbolic) {
  const Expression u = Expression::variable(0);
  const Expression shift = u - Expression::constant(static_cast<double>(i));
  const int w = m.omega[static_cast<std::size_t>(i - 1)];
  Expression out = Expression::power(shift, static_cast<unsigned>(w));
  for (int l = 0; l <= w - 2; ++l) {
    const auto it = std::find(order.begin(), order.end(), std::make_pair(i, l));
    const std::size_t slot = static_cast<std::size_t>(it - order.begin());
    Expression c = symbolic && slot < free ? Expression::variable(slot + 1)
                                           : Expression::constant(m.coefficient(i, l));
    if (c.is_constant(0.0)) continue;
    out = out + c * Expression::power(shift, static_cast<unsigned>(l));
  }
  return out;
}

Expression polynomial(const LocalModel& m, bool symbolic) {
  check_admissible(m.omega);
  const auto order = coefficient_order(m.omega);
  const std::size_t free = free_coefficients(m);
  Expression p = factor(m, 1, order, free, symbolic);
  for (int i = 2; i <= static_cast<int>(m.omega.size()); ++i)
    p = p * factor(m, i, order, free, symbolic);
  return simplify(p);
}

}  // namespace

double LocalModel::coefficient(int i, int l) const {
  const auto it = coefficients.find({i, l});
  return it == coefficients.end() ? 0.0 : it->second;
}

std::pair<double, double> LocalModel::u_window() const {
  return {0.0, static_cast<double>(omega.size()) + 1.0};
}

std::vector<std::pair<int, int>> coefficient_order(const OmegaType& omega) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (int l = 0; l <= omega[i] - 2; ++l) out.emplace_back(static_cast<int>(i) + 1, l);
  return out;
}

std::size_t free_coefficients(const LocalModel& m) {
  const std::size_t total = coefficient_order(m.omega).size();
  if (total > kMaxFree && !m.truncate)
    throw Error(ErrorKind::DimensionCap, "reduced norm of " + omega_string(m.omega) + " is " +
                                             std::to_string(total) +
                                             "; the model chart needs dimension <= 3");
  return std::min(total, kMaxFree);
}

std::size_t model_dimension(const LocalModel& m) {
  return std::max<std::size_t>(2, 1 + free_coefficients(m));
}

Expression build_polynomial(const LocalModel& m) { return polynomial(m, false); }

Expression chart_polynomial(const LocalModel& m) { return polynomial(m, true); }

Scene model_scene(const LocalModel& m, const ToleranceSet& tol) {
  const std::size_t dim = model_dimension(m);
  const std::size_t free = free_coefficients(m);
  const auto order = coefficient_order(m.omega);
  const auto [u0, u1] = m.u_window();
  Box box;
  box.min[0] = u0;
  box.max[0] = u1;
  for (std::size_t k = 1; k < dim; ++k) {
    const double c = k - 1 < free ? m.coefficient(order[k - 1].first, order[k - 1].second) : 0.0;
    box.min[k] = c - m.coefficient_halfwidth;
    box.max[k] = c + m.coefficient_halfwidth;
  }
  std::vector<Expression> v(dim, Expression::constant(0.0));
  v[0] = Expression::constant(1.0);
  return Scene(dim, chart_polynomial(m), v, Expression::variable(0), box, tol);
}

std::vector<TrajectoryRecord> trajectories_on_line(const Scene& scene, const Point& base) {
  const double contact = scene.tol().contact;
  const double u0 = scene.bbox().min[0];
  const double u1 = scene.bbox().max[0];
  const std::size_t steps = 200 * static_cast<std::size_t>(std::ceil(u1 - u0));
  auto at = [&](double u) {
    Point p = base;
    p[0] = u;
    return p;
  };

  std::vector<double> us(steps + 1), zs(steps + 1), dz(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    us[k] = u0 + (u1 - u0) * static_cast<double>(k) / static_cast<double>(steps);
    zs[k] = scene.z_at(at(us[k]));
    dz[k] = scene.lie_value(1, at(us[k]));
  }

  std::vector<Point> seeds;
  for (std::size_t k = 0; k <= steps;) {
    if (zs[k] > contact) {
      ++k;
      continue;
    }
    std::size_t best = k;
    while (k <= steps && zs[k] <= contact) {
      if (zs[k] < zs[best]) best = k;
      ++k;
    }
    seeds.push_back(at(us[best]));
  }
  // Touching points that fall between grid nodes.
  for (std::size_t k = 0; k < steps; ++k) {
    if (zs[k] <= contact || zs[k + 1] <= contact || !(dz[k] < 0.0 && dz[k + 1] > 0.0)) continue;
    double lo = us[k], hi = us[k + 1];
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      (scene.lie_value(1, at(mid)) < 0.0 ? lo : hi) = mid;
    }
    if (scene.z_at(at(lo)) <= contact) seeds.push_back(at(lo));
  }

  std::vector<TrajectoryRecord> out;
  for (const auto& rec : trace_batch(scene, seeds)) {
    bool dup = false;
    for (const auto& r : out)
      if (same_contacts(r.divisor.contacts, rec.divisor.contacts, scene.tol().cluster)) dup = true;
    if (!dup) out.push_back(rec);
  }
  std::sort(out.begin(), out.end(), [](const TrajectoryRecord& a, const TrajectoryRecord& b) {
    return a.divisor.contacts.front().coords[0] < b.divisor.contacts.front().coords[0];
  });
  return out;
}

RoundtripReport roundtrip(const OmegaType& omega, double epsilon, bool truncate) {
  RoundtripReport report;
  report.omega = omega;
  LocalModel m;
  m.omega = omega;
  m.truncate = truncate;
  const Scene scene = model_scene(m);
  const std::size_t free = free_coefficients(m);
  report.dimension = scene.dimension();
  report.truncated = coefficient_order(omega).size() > free;
  const Norms target = norms(omega);

  Point origin{};
  const auto at_origin = trajectories_on_line(scene, origin);
  report.margin = std::numeric_limits<double>::infinity();
  for (const auto& r : at_origin) {
    report.origin_omegas.push_back(r.omega);
    report.margin = std::min(report.margin, r.margin);
  }
  report.origin_ok = at_origin.size() == 1 && at_origin.front().omega == omega;
  if (!report.origin_ok)
    report.failures.push_back("origin traces " + std::to_string(at_origin.size()) +
                              " trajectories, expected one of type " + omega_string(omega));

  std::size_t combos = 1;
  for (std::size_t k = 0; k < free; ++k) combos *= 3;
  for (std::size_t code = 0; code < combos; ++code) {
    PerturbationResult pr;
    std::size_t c = code;
    bool origin_line = true;
    for (std::size_t k = 0; k < free; ++k, c /= 3) {
      const int digit = static_cast<int>(c % 3) - 1;
      pr.offset[k + 1] = digit * epsilon;
      origin_line = origin_line && digit == 0;
    }
    if (origin_line) continue;
    for (const auto& r : trajectories_on_line(scene, pr.offset)) {
      pr.omegas.push_back(r.omega);
      report.margin = std::min(report.margin, r.margin);
      const Norms n = norms(r.omega);
      pr.total_multiplicity += n.norm;
      if (!check_parity(r.divisor)) {
        pr.ok = false;
        report.failures.push_back("perturbed trace " + omega_string(r.omega) + " breaks parity");
      }
      if (n.norm > target.norm || n.reduced > target.reduced) {
        pr.ok = false;
        report.failures.push_back("perturbed trace " + omega_string(r.omega) + " exceeds the norms of " +
                                  omega_string(omega));
      }
    }
    if (pr.total_multiplicity > target.norm) {
      pr.ok = false;
      report.failures.push_back("total multiplicity " + std::to_string(pr.total_multiplicity) +
                                " on a perturbed line exceeds " + std::to_string(target.norm));
    }
    report.perturbations.push_back(pr);
  }
  if (!std::isfinite(report.margin)) report.margin = 0.0;
  report.passed = report.failures.empty();
  return report;
}

Json to_json(const RoundtripReport& r) {
  Json perturbations = Json::array();
  for (const auto& p : r.perturbations) {
    Json offset = Json::array();
    for (std::size_t k = 1; k < r.dimension; ++k) offset.push_back(round12(p.offset[k]));
    perturbations.push_back({{"offset", offset},
                             {"omegas", p.omegas},
                             {"total_multiplicity", p.total_multiplicity},
                             {"ok", p.ok}});
  }
  return Json{{"omega", r.omega},
              {"dimension", r.dimension},
              {"truncated", r.truncated},
              {"origin_omegas", r.origin_omegas},
              {"origin_ok", r.origin_ok},
              {"margin", round12(r.margin)},
              {"perturbations", perturbations},
              {"passed", r.passed},
              {"failures", r.failures}};
}

OmegaType parse_omega(const std::string& text) {
  std::string cleaned;
  for (char ch : text)
    if (ch != '(' && ch != ')' && ch != ' ') cleaned += ch;
  OmegaType w;
  std::stringstream ss(cleaned);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw Error(ErrorKind::Parse, "empty entry in multiplicity word '" + text + "'");
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad multiplicity word '" + text + "'");
    }
    if (used != item.size() || value < 1)
      throw Error(ErrorKind::Parse, "bad multiplicity word '" + text + "'");
    w.push_back(value);
  }
  if (w.empty()) throw Error(ErrorKind::Parse, "empty multiplicity word");
  return w;
}

}  // namespace th
