#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "th/error.hpp"
#include "th/tracer.hpp"

using namespace th;

namespace {

// Reference check of the divisor law on a word: odd ends with even interior, or one even entry.
bool parity_reference(const OmegaType& w) {
  if (w.empty()) return false;
  if (w.size() == 1) return w[0] % 2 == 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool end = i == 0 || i + 1 == w.size();
    if ((w[i] % 2 == 1) != end) return false;
  }
  return true;
}

void check_record(const Scene& s, const TrajectoryRecord& r) {
  const auto& c = r.divisor.contacts;
  REQUIRE_FALSE(c.empty());
  CHECK(check_parity(r.divisor));
  CHECK(r.omega == omega_of(r.divisor));
  CHECK(gamma_multiplicities(r.divisor) == norms(r.omega));
  CHECK(norms(r.omega).norm % 2 == 0);
  CHECK(r.divisor.singleton == (c.size() == 1));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i - 1].fval < c[i].fval);
  for (const auto& b : c) {
    CHECK(std::abs(s.z_at(b.coords)) <= s.tol().contact);
    CHECK(b.fval == doctest::Approx(s.f_at(b.coords)));
  }
}

}  // namespace

TEST_CASE("omega words: parity and norms") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    OmegaType w(std::uniform_int_distribution<std::size_t>(1, 5)(rng));
    for (int& x : w) x = std::uniform_int_distribution<int>(1, 5)(rng);
    CHECK(check_parity(w) == parity_reference(w));
    const Norms n = norms(w);
    int sum = 0;
    for (int x : w) sum += x;
    CHECK(n.norm == sum);
    CHECK(n.reduced == sum - static_cast<int>(w.size()));
    if (check_parity(w)) CHECK(n.norm % 2 == 0);
  }
  CHECK(omega_string({1, 2, 1}) == "(1,2,1)");
  CHECK(check_parity(OmegaType{2}));
  CHECK_FALSE(check_parity(OmegaType{1}));
  CHECK_FALSE(check_parity(OmegaType{1, 2}));
  CHECK_FALSE(check_parity(OmegaType{2, 2}));
}

TEST_CASE("disk chords end on the circle") {
  const Scene s = test::fixture("disk");
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const double x = std::uniform_real_distribution<double>(-0.98, 0.98)(rng);
    const double h = std::sqrt(1 - x * x);
    const double y = std::uniform_real_distribution<double>(-h, h)(rng);
    const TrajectoryRecord r = trace(s, Point{x, y, 0.0});
    check_record(s, r);
    REQUIRE(r.divisor.contacts.size() == 2);
    CHECK(r.omega == OmegaType{1, 1});
    CHECK(r.divisor.contacts[0].coords[1] == doctest::Approx(-h).epsilon(1e-8));
    CHECK(r.divisor.contacts[1].coords[1] == doctest::Approx(h).epsilon(1e-8));
    CHECK(r.divisor.contacts[0].coords[0] == doctest::Approx(x).epsilon(1e-10));
    CHECK(r.divisor.contacts[0].side == -1);
    CHECK(r.divisor.contacts[1].side == 1);
  }
}

TEST_CASE("tangent point of the disk is a singleton") {
  const Scene s = test::fixture("disk");
  const TrajectoryRecord r = trace(s, Point{1.0, 0.0, 0.0});
  CHECK(r.divisor.singleton);
  CHECK(r.omega == OmegaType{2});
  CHECK(r.divisor.contacts[0].side == 1);
}

TEST_CASE("annulus trajectories of type (1,2,1)") {
  const Scene s = test::fixture("annulus");
  for (const Point& seed : {Point{1.0, 0.5, 0.0}, Point{1.0, 0.0, 0.0}, Point{1.0, std::sqrt(3.0), 0.0},
                            Point{-1.0, -1.2, 0.0}}) {
    const TrajectoryRecord r = trace(s, seed);
    check_record(s, r);
    CHECK(r.omega == OmegaType{1, 2, 1});
    const auto& mid = r.divisor.contacts[1];
    CHECK(std::abs(mid.coords[1]) < 1e-8);
    CHECK(mid.side == -1);
    CHECK(std::abs(r.divisor.contacts[0].coords[1] + std::sqrt(3.0)) < 1e-8);
  }
  const TrajectoryRecord outer = trace(s, Point{-2.0, 0.0, 0.0});
  CHECK(outer.omega == OmegaType{2});
  const TrajectoryRecord split = trace(s, Point{0.5, 1.5, 0.0});
  CHECK(split.omega == OmegaType{1, 1});
  // Chord through x0 = 0.5 above the hole: from y = sqrt(1 - 0.25) to sqrt(4 - 0.25).
  CHECK(split.divisor.contacts[0].coords[1] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-8));
  CHECK(split.divisor.contacts[1].coords[1] == doctest::Approx(std::sqrt(3.75)).epsilon(1e-8));
}

TEST_CASE("tilted chords match the line-circle intersection") {
  const Scene s = test::fixture("disk_tilted");
  std::mt19937_64 rng(12);
  const Point d{1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0), 0.0};
  for (int k = 0; k < 50; ++k) {
    const double r = std::sqrt(std::uniform_real_distribution<double>(0.0, 0.95)(rng));
    const double th = std::uniform_real_distribution<double>(0.0, 2 * M_PI)(rng);
    const Point p{r * std::cos(th), r * std::sin(th), 0.0};
    // p + t d on the unit circle: t^2 + 2 (p.d) t + |p|^2 - 1 = 0.
    const double pd = p[0] * d[0] + p[1] * d[1];
    const double disc = std::sqrt(pd * pd - (r * r - 1.0));
    const double t0 = -pd - disc, t1 = -pd + disc;
    const TrajectoryRecord rec = trace(s, p);
    check_record(s, rec);
    REQUIRE(rec.divisor.contacts.size() == 2);
    for (int i = 0; i < 2; ++i) {
      const double t = i == 0 ? t0 : t1;
      CHECK(rec.divisor.contacts[i].coords[0] == doctest::Approx(p[0] + t * d[0]).epsilon(1e-8));
      CHECK(rec.divisor.contacts[i].coords[1] == doctest::Approx(p[1] + t * d[1]).epsilon(1e-8));
    }
  }
}

TEST_CASE("divisor law over random seeds on every fixture") {
  int traced = 0;
  for (const auto& name : test::all_fixtures()) {
    const Scene s = test::fixture(name);
    std::mt19937_64 rng(100);
    std::vector<Point> seeds;
    while (seeds.size() < 150) {
      const Point p = test::uniform_in(s.bbox(), s.dimension(), rng);
      if (s.z_at(p) < 0.0) seeds.push_back(p);
    }
    for (const auto& r : trace_batch(s, seeds)) {
      INFO(name);
      check_record(s, r);
      ++traced;
    }
  }
  CHECK(traced >= 1000);
}

TEST_CASE("boundary seeds lie on the boundary") {
  for (const auto& name : test::planar_fixtures()) {
    const Scene s = test::fixture(name);
    const auto seeds = boundary_seeds(s, 16);
    CHECK(seeds.size() >= 16);
    for (const Point& p : seeds) CHECK(std::abs(s.z_at(p)) <= s.tol().contact);
  }
}

TEST_CASE("seeds outside X are refused") {
  const Scene s = test::fixture("disk");
  CHECK_THROWS_AS(trace(s, Point{1.4, 1.4, 0.0}), Error);
}

TEST_CASE("batch tracing is order-preserving") {
  const Scene s = test::fixture("annulus_tilted");
  const auto seeds = boundary_seeds(s, 8);
  const auto batch = trace_batch(s, seeds);
  REQUIRE(batch.size() == seeds.size());
  for (std::size_t i = 0; i < seeds.size(); i += 5) {
    const TrajectoryRecord one = trace(s, seeds[i]);
    CHECK(one.omega == batch[i].omega);
    CHECK(one.divisor.contacts.front().coords == batch[i].divisor.contacts.front().coords);
  }
}
