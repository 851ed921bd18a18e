#pragma once

#include <cstddef>
#include <functional>

#include "th/geometry.hpp"

namespace th {

struct OdeOptions {
  double rel = 1e-10;
  double abs = 1e-12;
  double h_max = 0.05;
  double h_min = 1e-14;
};

/// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) for autonomous
/// systems dx/dt = rhs(x) in up to three dimensions.
class DormandPrince {
 public:
  using Rhs = std::function<Point(const Point&)>;

  DormandPrince(Rhs rhs, std::size_t dim, OdeOptions options);

  struct Step {
    Point x;         // state at the end of the step
    double h = 0.0;  // step actually taken
    double h_next = 0.0;
  };

  /// Takes one accepted step starting with trial size h (h > 0), shrinking
  /// on rejection. The step never exceeds options.h_max or h_cap.
  Step step(const Point& x, double h, double h_cap) const;

  /// Integrates from x over exactly dt >= 0.
  Point advance(const Point& x, double dt) const;

  const OdeOptions& options() const { return options_; }
  Point rhs(const Point& x) const { return rhs_(x); }

 private:
  Rhs rhs_;
  std::size_t dim_;
  OdeOptions options_;
};

}  // namespace th
