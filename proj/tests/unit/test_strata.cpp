#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "th/error.hpp"
#include "th/strata.hpp"

using namespace th;

namespace {

Scene scene_of(std::size_t dim, const std::string& z, std::vector<std::string> v) {
  std::vector<Expression> field;
  for (const auto& c : v) field.push_back(parse(c, dim));
  Box box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
  return Scene(dim, parse(z, dim), field, parse("x" + std::to_string(dim - 1), dim), box);
}

bool orient_ok(const Scene& s, const BoundaryCurve& c) {
  // X lies to the left: the left normal of each segment points down the gradient of z.
  int bad = 0;
  const std::size_t n = c.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = c.points[i];
    const Point& b = c.points[(i + 1) % n];
    const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.0};
    const Point g = s.grad_z(mid);
    const double left = -(b[1] - a[1]) * g[0] + (b[0] - a[0]) * g[1];
    if (left >= 0.0) ++bad;
  }
  return bad == 0;
}

}  // namespace

TEST_CASE("multiplicities on the disk") {
  const Scene s = test::fixture("disk");
  auto m = multiplicity_at(s, Point{0.0, -1.0, 0.0});
  CHECK(m.multiplicity == 1);
  CHECK(m.side == -1);
  m = multiplicity_at(s, Point{0.0, 1.0, 0.0});
  CHECK(m.multiplicity == 1);
  CHECK(m.side == 1);
  m = multiplicity_at(s, Point{-1.0, 0.0, 0.0});
  CHECK(m.multiplicity == 2);
  CHECK(m.side == 1);
  CHECK_THROWS_AS(multiplicity_at(s, Point{0.0, 0.0, 0.0}), Error);
}

TEST_CASE("multiplicities on the annulus") {
  const Scene s = test::fixture("annulus");
  auto m = multiplicity_at(s, Point{1.0, 0.0, 0.0});
  CHECK(m.multiplicity == 2);
  CHECK(m.side == -1);
  m = multiplicity_at(s, Point{-2.0, 0.0, 0.0});
  CHECK(m.multiplicity == 2);
  CHECK(m.side == 1);
}

TEST_CASE("degenerate and deep contacts") {
  const Scene cubic2 = scene_of(2, "x1^3 + x0", {"0", "1"});
  try {
    classify_contact(cubic2, Point{});
    FAIL("expected DegenerateContact");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateContact);
  }
  const BoundaryPoint cubic3 = classify_contact(scene_of(3, "x2^3 + x0", {"0", "0", "1"}), Point{});
  CHECK(cubic3.multiplicity == 3);
  CHECK(cubic3.side == 1);
  CHECK_FALSE(cubic3.deep);
  const BoundaryPoint quartic = classify_contact(scene_of(3, "x0 - x2^4", {"0", "0", "1"}), Point{});
  CHECK(quartic.multiplicity == 4);
  CHECK(quartic.side == -1);
  CHECK(quartic.deep);
  CHECK_THROWS_AS(classify_contact(scene_of(3, "x0", {"0", "0", "1"}), Point{}), Error);
}

TEST_CASE("boundary and stratum membership follow their definitions") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    BoundaryPoint p;
    p.multiplicity = std::uniform_int_distribution<int>(1, 4)(rng);
    p.side = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
    CHECK(on_plus_boundary(p) == (p.multiplicity >= 2 || p.side > 0));
    CHECK(on_plus_stratum(p, 1) == on_plus_boundary(p));
    for (int k = 1; k <= 4; ++k) {
      // The tower vanishes through order k - 1 and the order-k term is >= 0.
      const bool vanishes_below_k = p.multiplicity >= k;
      const bool order_k_nonneg = p.multiplicity > k || p.side > 0;
      CHECK(on_plus_stratum(p, k) == (vanishes_below_k && order_k_nonneg));
      if (on_plus_stratum(p, k + 1)) CHECK(on_plus_stratum(p, k));
    }
  }
}

TEST_CASE("projection lands on the boundary") {
  const Scene s = test::fixture("annulus");
  std::mt19937_64 rng(4);
  int converged = 0;
  for (int k = 0; k < 200; ++k) {
    Point p = test::uniform_in(s.bbox(), 2, rng);
    const double r = std::hypot(p[0], p[1]);
    if (r < 0.2) continue;
    if (project_to_boundary(s, p, 1e-12)) {
      ++converged;
      CHECK(std::abs(s.z_at(p)) <= 1e-12);
      const double rr = std::hypot(p[0], p[1]);
      CHECK((std::abs(rr - 1.0) < 1e-9 || std::abs(rr - 2.0) < 1e-9));
    }
  }
  CHECK(converged > 150);
}

TEST_CASE("extracted curves are closed, projected and oriented") {
  struct Expect {
    std::string name;
    std::vector<double> lengths;
  };
  const std::vector<Expect> cases{{"disk", {2 * M_PI}},
                                  {"disk_tilted", {2 * M_PI}},
                                  {"annulus", {4 * M_PI, 2 * M_PI}},
                                  {"two_disks", {2 * M_PI, 2 * M_PI}}};
  for (const auto& c : cases) {
    INFO(c.name);
    const Scene s = test::fixture(c.name);
    const auto curves = extract_boundary_curves(s);
    REQUIRE(curves.size() == c.lengths.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
      CHECK(curves[i].length == doctest::Approx(c.lengths[i]).epsilon(2e-3));
      CHECK(curves[i].arclength.size() == curves[i].points.size() + 1);
      CHECK(orient_ok(s, curves[i]));
      for (const Point& p : curves[i].points) CHECK(std::abs(s.z_at(p)) <= s.tol().contact / 10);
    }
  }
}

TEST_CASE("curve parameterization round trip") {
  const Scene s = test::fixture("disk");
  const BoundaryCurve c = extract_boundary_curves(s).front();
  for (int k = 0; k < 50; ++k) {
    const double t = c.length * k / 50.0;
    const auto loc = c.locate(c.at(t));
    CHECK(loc.distance < 1e-12);
    CHECK(std::abs(loc.s - t) < 1e-9);
  }
}

TEST_CASE("domains touching the box are refused") {
  Json j = Json::parse(R"({"dimension": 2, "z": "x0^2 + x1^2 - 4", "v": ["0", "1"], "f": "x1",
                          "bbox": {"min": [-1.5, -1.5], "max": [1.5, 1.5]}})");
  try {
    extract_boundary_curves(scene_from_json(j));
    FAIL("expected CurveExtraction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CurveExtraction);
  }
}

TEST_CASE("tangency points of planar fixtures") {
  // On a unit circle the field v is tangent where the radius is normal to v.
  struct Expect {
    std::string name;
    std::vector<std::array<double, 4>> points;  // x, y, multiplicity, side
  };
  const double a = 2.0 / std::sqrt(5.0), b = 1.0 / std::sqrt(5.0);
  const std::vector<Expect> cases{
      {"disk", {{-1, 0, 2, 1}, {1, 0, 2, 1}}},
      {"disk_horizontal", {{0, -1, 2, 1}, {0, 1, 2, 1}}},
      {"disk_tilted", {{-a, b, 2, 1}, {a, -b, 2, 1}}},
      {"annulus", {{-2, 0, 2, 1}, {2, 0, 2, 1}, {-1, 0, 2, -1}, {1, 0, 2, -1}}},
      {"two_disks", {{-3, 0, 2, 1}, {-1, 0, 2, 1}, {1, 0, 2, 1}, {3, 0, 2, 1}}}};
  for (const auto& c : cases) {
    INFO(c.name);
    const Scene s = test::fixture(c.name);
    const auto curves = extract_boundary_curves(s);
    const auto tangencies = locate_tangencies(s, curves);
    const auto locus = tangency_locus_2d(s);
    CHECK(tangencies.size() == c.points.size());
    CHECK(locus.size() == c.points.size());
    for (const auto& want : c.points) {
      bool found = false;
      for (const auto& t : tangencies) {
        if (std::hypot(t.point.coords[0] - want[0], t.point.coords[1] - want[1]) > 1e-8) continue;
        found = true;
        CHECK(t.point.multiplicity == static_cast<int>(want[2]));
        CHECK(t.point.side == static_cast<int>(want[3]));
        CHECK(std::abs(s.lie_value(1, t.point.coords)) < 1e-10);
      }
      CHECK(found);
    }
    for (std::size_t i = 1; i < tangencies.size(); ++i) {
      const bool ordered = tangencies[i - 1].curve < tangencies[i].curve ||
                           (tangencies[i - 1].curve == tangencies[i].curve &&
                            tangencies[i - 1].s <= tangencies[i].s);
      CHECK(ordered);
    }
  }
}

TEST_CASE("ball samples: tangencies sit on the equator") {
  const Scene s = test::fixture("ball");
  const auto samples = stratum_sample_3d(s, 1500);
  CHECK(samples.size() >= 1500);
  int tangent = 0;
  for (const auto& b : samples) {
    CHECK(std::abs(s.z_at(b.coords)) <= s.tol().contact);
    CHECK(b.multiplicity <= 2);
    if (b.multiplicity == 2) {
      ++tangent;
      CHECK(std::abs(b.coords[2]) < 1e-6);
      CHECK(b.side == 1);
    } else {
      CHECK(b.side == (b.coords[2] > 0 ? 1 : -1));
    }
  }
  CHECK(tangent > 0);
  CHECK(std::is_sorted(samples.begin(), samples.end(),
                       [](const BoundaryPoint& x, const BoundaryPoint& y) { return x.coords < y.coords; }));
  const auto again = stratum_sample_3d(s, 1500);
  REQUIRE(again.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(again[i].coords == samples[i].coords);
}

TEST_CASE("torus samples see both folds") {
  const Scene s = test::fixture("torus");
  int plus = 0, minus = 0;
  for (const auto& b : stratum_sample_3d(s, 2000)) {
    if (b.multiplicity < 2) continue;
    (b.side > 0 ? plus : minus)++;
  }
  CHECK(plus > 0);
  CHECK(minus > 0);
}
