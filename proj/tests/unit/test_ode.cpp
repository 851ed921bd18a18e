#include <doctest.h>

#include <cmath>

#include "th/ode.hpp"

using namespace th;

TEST_CASE("rotation field follows the circle") {
  const DormandPrince rk([](const Point& x) { return Point{-x[1], x[0], 0.0}; }, 2, {});
  for (double t : {0.1, 1.0, 3.0, 2.0 * M_PI}) {
    const Point y = rk.advance(Point{1.0, 0.0, 0.0}, t);
    CHECK(y[0] == doctest::Approx(std::cos(t)).epsilon(1e-9));
    CHECK(y[1] == doctest::Approx(std::sin(t)).epsilon(1e-9));
  }
}

TEST_CASE("exponential growth in three dimensions") {
  const DormandPrince rk([](const Point& x) { return Point{x[0], -2.0 * x[1], 0.5 * x[2]}; }, 3,
                         {});
  const Point y = rk.advance(Point{1.0, 1.0, 2.0}, 1.5);
  CHECK(y[0] == doctest::Approx(std::exp(1.5)).epsilon(1e-9));
  CHECK(y[1] == doctest::Approx(std::exp(-3.0)).epsilon(1e-9));
  CHECK(y[2] == doctest::Approx(2.0 * std::exp(0.75)).epsilon(1e-9));
}

TEST_CASE("steps respect the caps") {
  OdeOptions o;
  o.h_max = 0.01;
  const DormandPrince rk([](const Point&) { return Point{1.0, 0.0, 0.0}; }, 1, o);
  const auto s = rk.step(Point{}, 1.0, 0.5);
  CHECK(s.h == doctest::Approx(0.01));
  CHECK(s.x[0] == doctest::Approx(0.01));
  const auto t = rk.step(Point{}, 1.0, 0.004);
  CHECK(t.h == doctest::Approx(0.004));
  CHECK(rk.advance(Point{}, 0.37)[0] == doctest::Approx(0.37).epsilon(1e-13));
}
