#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afnlab/map.hpp"

#include <cmath>
#include <random>

using namespace afn;

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(MapParams(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MapParams(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(MapParams(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MapParams(1.0, 1.5), std::invalid_argument);
  MapParams p(0.5, 1.0);
  CHECK(p.beta == doctest::Approx(2.0));
  CHECK(p.finite_measure);
  CHECK_FALSE(MapParams(1.5, 1.0).finite_measure);
}

TEST_CASE("eval examples") {
  MapParams p(1.0, 1.0);
  CHECK(map_eval(p, 0.0) == 0.0);
  CHECK(map_eval(p, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(map_eval(p, 1.0) == doctest::Approx(0.0).epsilon(1e-15));  // 2 mod 1
  CHECK(map_eval(p, 0.75) == doctest::Approx(0.3125).epsilon(1e-14));
  CHECK_THROWS_AS(map_eval(p, 1.5), std::domain_error);
  CHECK_THROWS_AS(map_eval(p, -0.2), std::domain_error);
}

TEST_CASE("derivative") {
  MapParams p(1.0, 1.0);
  CHECK(map_deriv(p, 0.0) == 1.0);
  CHECK(map_deriv(p, 1.0) == doctest::Approx(3.0));
  MapParams q(0.5, 1.0);
  CHECK(map_deriv(q, 0.25) == doctest::Approx(1.75));  // 1 + 1.5*0.5
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) CHECK(map_deriv(q, u(rng)) >= 1.0);
}

TEST_CASE("e0 closed forms") {
  // e(1+e) = 1  =>  e = (sqrt 5 - 1)/2
  double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(std::fabs(solve_e0(MapParams(1.0, 1.0)) - golden) < 1e-14);
  // 0.5 e^2 + e - 1 = 0  =>  e = sqrt(3) - 1
  double r = std::sqrt(3.0) - 1.0;
  CHECK(std::fabs(solve_e0(MapParams(1.0, 0.5)) - r) < 1e-14);
  // defining property under the wrap, for several parameter pairs
  for (auto [a, b] : {std::pair{0.5, 1.0}, {1.5, 1.0}, {1.0, 0.7}, {2.0, 0.3}}) {
    MapParams p(a, b);
    double e0 = solve_e0(p);
    CHECK(std::fabs(map_eval(p, e0)) < 1e-12);
  }
}

TEST_CASE("branch inversion") {
  MapParams p(1.0, 1.0);
  double e0 = solve_e0(p);
  // x1 = (-1 + sqrt(1+4 e0)) / 2, root of x(1+x) = e0
  double x1 = (-1.0 + std::sqrt(1.0 + 4.0 * e0)) / 2.0;
  CHECK(std::fabs(invert_branch(p, Branch::Left, e0) - x1) < 1e-14);
  CHECK(invert_branch(p, Branch::Left, 0.0) == 0.0);
  CHECK(std::fabs(invert_branch(p, Branch::Right, 0.0) - e0) < 1e-14);
  CHECK_THROWS_AS(invert_branch(MapParams(1.0, 0.5), Branch::Right, 0.9),
                  std::domain_error);
}

TEST_CASE("inversion round trip and monotonicity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (auto [a, b] : {std::pair{0.5, 1.0}, {1.5, 1.0}, {1.0, 0.6}}) {
    MapParams p(a, b);
    double e0 = solve_e0(p);
    for (int i = 0; i < 300; ++i) {
      double x = u01(rng) * e0;
      double z = left_value(p, x);
      CHECK(std::fabs(invert_branch(p, Branch::Left, z) - x) < 1e-10);
      double y = e0 + u01(rng) * (1.0 - e0);
      double zr = right_value(p, y);
      CHECK(std::fabs(invert_branch(p, Branch::Right, zr) - y) < 1e-10);
    }
    // strictly increasing on each branch domain
    for (int i = 0; i < 200; ++i) {
      double x1 = u01(rng) * e0, x2 = u01(rng) * e0;
      if (x1 == x2) continue;
      if (x1 > x2) std::swap(x1, x2);
      CHECK(left_value(p, x1) < left_value(p, x2));
      double y1 = e0 + u01(rng) * (1 - e0), y2 = e0 + u01(rng) * (1 - e0);
      if (y1 > y2) std::swap(y1, y2);
      if (y1 == y2) continue;
      CHECK(right_value(p, y1) < right_value(p, y2));
    }
    // repulsion from the fixed point on (0, e0)
    for (int i = 0; i < 200; ++i) {
      double x = 1e-6 + u01(rng) * (e0 - 2e-6);
      CHECK(map_eval(p, x) > x);
    }
  }
}

TEST_CASE("iterate") {
  MapParams p(1.0, 1.0);
  double e0 = solve_e0(p);
  CHECK(iterate(p, 0.37, 0) == 0.37);
  CHECK(iterate(p, 0.75, 1) == doctest::Approx(0.3125));
  CHECK(iterate(p, e0, 2) == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<uint8_t> visits;
  iterate_recorded(p, 0.75, 16, e0, visits);
  CHECK(visits.size() == 16);
}
