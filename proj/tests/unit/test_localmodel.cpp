#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "th/error.hpp"
#include "th/localmodel.hpp"

using namespace th;

TEST_CASE("model polynomials expand as products") {
  LocalModel m;
  m.omega = {1, 2, 1};
  const Expression p = build_polynomial(m);
  for (double u : {0.0, 0.5, 1.5, 2.0, 3.7}) {
    const double want = (u - 1) * (u - 2) * (u - 2) * (u - 3);
    CHECK(evaluate(p, Point{u, 0.0, 0.0}) == doctest::Approx(want));
  }
  m.omega = {2};
  m.coefficients[{1, 0}] = -0.1;
  CHECK(evaluate(build_polynomial(m), Point{1.0, 0.0, 0.0}) == doctest::Approx(-0.1));
  CHECK(degree_in(build_polynomial(m), 0) == 2);
}

TEST_CASE("chart polynomial exposes the free coefficients") {
  LocalModel m;
  m.omega = {3, 1};
  CHECK(coefficient_order(m.omega) == std::vector<std::pair<int, int>>{{1, 0}, {1, 1}});
  CHECK(free_coefficients(m) == 2);
  CHECK(model_dimension(m) == 3);
  const Expression p = chart_polynomial(m);
  // P(u, a, b) = ((u-1)^3 + b (u-1) + a) (u - 2)
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const Point x{std::uniform_real_distribution<double>(0, 3)(rng),
                  std::uniform_real_distribution<double>(-1, 1)(rng),
                  std::uniform_real_distribution<double>(-1, 1)(rng)};
    const double s = x[0] - 1;
    CHECK(evaluate(p, x) == doctest::Approx((s * s * s + x[2] * s + x[1]) * (x[0] - 2)));
  }
}

TEST_CASE("models beyond the chart dimension") {
  LocalModel m;
  m.omega = {1, 4, 1};
  try {
    free_coefficients(m);
    FAIL("expected DimensionCap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionCap);
  }
  m.truncate = true;
  CHECK(free_coefficients(m) == 2);
  CHECK(model_dimension(m) == 3);
  m.omega = {1, 1};
  CHECK(free_coefficients(m) == 0);
  CHECK(model_dimension(m) == 2);
  m.omega = {1, 2};
  CHECK_THROWS_AS(build_polynomial(m), Error);
}

TEST_CASE("the fold model splits and vanishes") {
  LocalModel m;
  m.omega = {2};
  const Scene s = model_scene(m);
  CHECK(trajectories_on_line(s, Point{0.0, -0.05, 0.0}).front().omega == OmegaType{1, 1});
  CHECK(trajectories_on_line(s, Point{0.0, 0.05, 0.0}).empty());
  const auto at_origin = trajectories_on_line(s, Point{});
  REQUIRE(at_origin.size() == 1);
  CHECK(at_origin.front().omega == OmegaType{2});
  CHECK(at_origin.front().divisor.contacts.front().coords[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("round trip recovers every test word") {
  for (const OmegaType& w : std::vector<OmegaType>{{1, 1}, {2}, {1, 2, 1}, {3, 1}, {1, 3}, {1, 4, 1},
                                                   {1, 2, 2, 1}, {4}}) {
    INFO(omega_string(w));
    const RoundtripReport r = roundtrip(w, 1e-2, true);
    CHECK(r.origin_ok);
    CHECK(r.passed);
    CHECK(r.failures.empty());
    LocalModel m;
    m.omega = w;
    m.truncate = true;
    std::size_t expected = 1;
    for (std::size_t k = 0; k < free_coefficients(m); ++k) expected *= 3;
    CHECK(r.perturbations.size() == expected - 1);
  }
  CHECK(roundtrip({1, 4, 1}).truncated);
  CHECK_FALSE(roundtrip({1, 2, 1}).truncated);
}

TEST_CASE("word parsing") {
  CHECK(parse_omega("1,2,1") == OmegaType{1, 2, 1});
  CHECK(parse_omega("(3, 1)") == OmegaType{3, 1});
  CHECK(parse_omega("2") == OmegaType{2});
  CHECK_THROWS_AS(parse_omega(""), Error);
  CHECK_THROWS_AS(parse_omega("1,,1"), Error);
  CHECK_THROWS_AS(parse_omega("1,a"), Error);
  CHECK_THROWS_AS(parse_omega("0,2"), Error);
}
