#include <doctest.h>

#include <random>

#include "support.hpp"
#include "th/error.hpp"
#include "th/scene.hpp"

using namespace th;

namespace {

Json disk_json() {
  return Json::parse(R"({"dimension": 2, "z": "x0^2 + x1^2 - 1", "v": ["0", "1"], "f": "x1",
                         "bbox": {"min": [-1.5, -1.5], "max": [1.5, 1.5]}})");
}

}  // namespace

TEST_CASE("every fixture validates") {
  for (const auto& name : test::all_fixtures()) {
    INFO(name);
    const ValidationReport r = validate(test::fixture(name));
    CHECK(r.passed);
    CHECK(r.failures.empty());
    CHECK(r.lyapunov_min > 0.0);
    CHECK(r.containment_ok);
  }
}

TEST_CASE("validation reports broken hypotheses") {
  const ValidationReport bad_f = validate(load_scene(test::data_path("disk_bad_lyapunov.json")));
  CHECK_FALSE(bad_f.passed);
  CHECK(bad_f.lyapunov_min < 0.0);

  Json j = disk_json();
  j["z"] = "x0^2 + x1^2 - 4";
  const ValidationReport walls = validate(scene_from_json(j));
  CHECK_FALSE(walls.passed);
  CHECK_FALSE(walls.containment_ok);

  j = disk_json();
  j["z"] = "x0^2 + x1^2 + 1";
  const ValidationReport empty = validate(scene_from_json(j));
  CHECK_FALSE(empty.passed);
  CHECK_FALSE(empty.nonempty);

  j = disk_json();
  j["v"] = Json::array({"x0", "x1"});
  j["f"] = "x0^2 + x1^2";
  CHECK_FALSE(validate(scene_from_json(j)).passed);
}

TEST_CASE("malformed scenes are rejected") {
  Json j = disk_json();
  j["dimension"] = 4;
  CHECK_THROWS_AS(scene_from_json(j), Error);
  j = disk_json();
  j["v"] = Json::array({"1"});
  CHECK_THROWS_AS(scene_from_json(j), Error);
  j = disk_json();
  j["z"] = "x0^2 + x2";
  CHECK_THROWS_AS(scene_from_json(j), ParseError);
  j = disk_json();
  j["tol"] = {{"contact", -1.0}};
  CHECK_THROWS_AS(scene_from_json(j), Error);
  j = disk_json();
  j["tol"] = {{"deriv_zero", 2.0}};
  CHECK_THROWS_AS(scene_from_json(j), Error);
  j = disk_json();
  j["bbox"]["min"] = Json::array({1.5, -1.5});
  CHECK_THROWS_AS(scene_from_json(j), Error);
  j = disk_json();
  j.erase("f");
  CHECK_THROWS_AS(scene_from_json(j), Error);
}

TEST_CASE("scene json round trip") {
  for (const auto& name : test::all_fixtures()) {
    const Scene a = test::fixture(name);
    const Scene b = scene_from_json(scene_to_json(a));
    CHECK(scene_to_json(a) == scene_to_json(b));
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
      const Point p = test::uniform_in(a.bbox(), a.dimension(), rng);
      CHECK(a.z_at(p) == doctest::Approx(b.z_at(p)));
      CHECK(a.lie_value(2, p) == doctest::Approx(b.lie_value(2, p)));
    }
  }
}

TEST_CASE("hand-derived Lie tower of the disk") {
  const Scene s = test::fixture("disk");
  const Point p{0.3, -0.7, 0.0};
  CHECK(s.lie_value(0, p) == doctest::Approx(0.09 + 0.49 - 1.0));
  CHECK(s.lie_value(1, p) == doctest::Approx(-1.4));
  CHECK(s.lie_value(2, p) == doctest::Approx(2.0));
  CHECK(s.lie_value(3, p) == doctest::Approx(0.0));
  CHECK(s.lie_value(7, p) == doctest::Approx(0.0));
}

TEST_CASE("hand-derived Lie tower of the annulus at its inner tangency") {
  // z = -(r^2 - 1)(4 - r^2) with v = d/dx1; along x1 at x0 = 1: z(t) = -t^2 (3 - t^2).
  const Scene s = test::fixture("annulus");
  const Point p{1.0, 0.0, 0.0};
  CHECK(s.lie_value(0, p) == doctest::Approx(0.0));
  CHECK(s.lie_value(1, p) == doctest::Approx(0.0));
  CHECK(s.lie_value(2, p) == doctest::Approx(-6.0));
  CHECK(s.lie_value(3, p) == doctest::Approx(0.0));
  CHECK(s.lie_value(4, p) == doctest::Approx(24.0));
}

TEST_CASE("Lie towers match nested finite differences") {
  for (const auto& name : test::all_fixtures()) {
    const Scene s = test::fixture(name);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 50; ++k) {
      const Point p = test::uniform_in(s.bbox(), s.dimension(), rng);
      for (std::size_t order = 1; order <= 3; ++order) {
        INFO(name, " order ", order);
        CHECK(test::relative_error(s.lie_value(order, p), test::nested_lie_fd(s, p, order, test::lie_fd_step(order))) <
              1e-4);
      }
    }
  }
}

TEST_CASE("gradients match central differences") {
  for (const auto& name : test::all_fixtures()) {
    const Scene s = test::fixture(name);
    std::mt19937_64 rng(29);
    for (int k = 0; k < 50; ++k) {
      const Point p = test::uniform_in(s.bbox(), s.dimension(), rng);
      const Point gz = s.grad_z(p);
      const Point gf = s.grad_f(p);
      for (std::size_t i = 0; i < s.dimension(); ++i) {
        CHECK(test::relative_error(gz[i], test::central_partial(s.z(), p, i, 1e-5)) < 1e-6);
        CHECK(test::relative_error(gf[i], test::central_partial(s.f(), p, i, 1e-5)) < 1e-6);
      }
    }
  }
}

TEST_CASE("tolerance overrides") {
  const Scene s = test::fixture("disk");
  ToleranceSet t = s.tol();
  t.contact = 1e-4;
  CHECK(s.with_tolerances(t).tol().contact == 1e-4);
  t.contact = 100.0;
  CHECK_THROWS_AS(s.with_tolerances(t), Error);
}
