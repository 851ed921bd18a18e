#include "th/ode.hpp"

#include <algorithm>
#include <cmath>

namespace th {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

}  // namespace

DormandPrince::DormandPrince(Rhs rhs, std::size_t dim, OdeOptions options)
    : rhs_(std::move(rhs)), dim_(dim), options_(options) {}

DormandPrince::Step DormandPrince::step(const Point& x, double h, double h_cap) const {
  h = std::min({h, options_.h_max, h_cap});
  const Point k1 = rhs_(x);
  for (;;) {
    const Point k2 = rhs_(x + (h * a21) * k1);
    const Point k3 = rhs_(x + h * (a31 * k1 + a32 * k2));
    const Point k4 = rhs_(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Point k5 = rhs_(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Point k6 = rhs_(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Point y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Point k7 = rhs_(y);
    const Point err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double scale = options_.abs + options_.rel * std::max(std::abs(x[i]), std::abs(y[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / scale);
    }

    if (err_norm <= 1.0 || h <= options_.h_min) {
      const double factor =
          err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      return Step{y, h, std::min(h * factor, options_.h_max)};
    }
    h = std::max(h * std::clamp(0.9 * std::pow(err_norm, -0.25), 0.1, 0.5), options_.h_min);
  }
}

Point DormandPrince::advance(const Point& x, double dt) const {
  Point y = x;
  double remaining = dt;
  double h = std::min(dt, options_.h_max);
  while (remaining > 0.0) {
    const Step s = step(y, h, remaining);
    y = s.x;
    remaining -= s.h;
    if (remaining <= 1e-15 * std::max(1.0, dt)) break;
    h = s.h_next;
  }
  return y;
}

}  // namespace th
