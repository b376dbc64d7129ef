#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afnlab/fit.hpp"
#include "afnlab/lattice.hpp"

#include <cmath>
#include <random>

using namespace afn;

TEST_CASE("x ladder values and residuals") {
  MapParams p(1.0, 1.0);
  OrbitLattice lat = build_lattice_auto(p, 2000, 1e9);
  double e0 = (std::sqrt(5.0) - 1.0) / 2.0;
  CHECK(std::fabs(lat.e0 - e0) < 1e-14);
  double x1 = (-1.0 + std::sqrt(1.0 + 4.0 * e0)) / 2.0;
  CHECK(std::fabs(lat.x[1] - x1) < 1e-13);
  LatticeResiduals r = lattice_residuals(lat);
  CHECK(r.x_max <= 1e-10);
  CHECK(r.y_max <= 1e-10);
  CHECK(r.e_max <= 1e-8);
  for (long long n = 1; n <= lat.depth_n(); ++n) CHECK(lat.x[n] < lat.x[n - 1]);
}

TEST_CASE("ladder exponent matches beta") {
  for (double alpha : {0.5, 1.5}) {
    MapParams p(alpha, 1.0);
    OrbitLattice lat = build_lattice_auto(p, 10000, 1e9);
    LinFit f = loglog_fit(lat.x, 100, 10000);
    CHECK(std::fabs(-f.slope - p.beta) < 0.05);
    // c* estimate n^beta x_n stabilizes over the last decade
    double c1 = std::pow(1000.0 + 1.0, p.beta) * lat.x[1000];
    double c2 = std::pow(10000.0 + 1.0, p.beta) * lat.x[10000];
    CHECK(std::fabs(c1 - c2) / c2 < 0.02);
  }
}

TEST_CASE("sigma/tau bookkeeping") {
  for (auto [a, b] : {std::pair{0.5, 1.0}, {1.5, 1.0}, {1.0, 0.6}}) {
    MapParams p(a, b);
    OrbitLattice lat = build_lattice_auto(p, 4000, 1e8);
    REQUIRE(lat.depth_k() >= 3);
    for (int k = 1; k <= lat.depth_k(); ++k) {
      CHECK(lat.tau1[k] == lat.tau1[k - 1] + lat.sigma[k]);  // exact integers
      CHECK(lat.e[k] > lat.e[k - 1]);
      CHECK(lat.fwd_residual[k] <= 1e-8);
    }
    // tau_k / lambda_k summable in practice: geometric-like partial sums
    double prev = 0, sum = 0;
    for (int k = 1; k <= lat.depth_k(); ++k) {
      sum += (double)lat.tau1[k] / lat.lambda[k];
      if (k > 3) CHECK(sum - prev < 0.7 * (prev == 0 ? sum : sum));  // Cauchy-ish
      prev = sum;
    }
    double tail = (double)lat.tau1[lat.depth_k()] / lat.lambda[lat.depth_k()];
    CHECK(tail < 1e-6 * (1 + sum));
  }
}

TEST_CASE("first return time against brute-force orbit") {
  MapParams p(0.5, 1.0);
  OrbitLattice lat = build_lattice_auto(p, 40000, 1e8);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(lat.e0, 1.0);
  auto brute = [&](double y) {
    double x = y;
    for (long long n = 1; n < 200000; ++n) {
      x = map_eval(p, x);
      if (x >= lat.e0) return n;
    }
    return (long long)-1;
  };
  for (int i = 0; i < 400; ++i) {
    double y = u(rng);
    long long a = first_return_time(p, lat, y);
    long long b = brute(y);
    CHECK(a == b);
  }
  // tau(y_j) = j at ladder midpoints
  for (long long j = lat.y_first + 1; j < 50; ++j) {
    double mid = 0.5 * (lat.y[j] + lat.y[j - 1]);
    CHECK(first_return_time(p, lat, mid) == j);
  }
}

TEST_CASE("return branch inverse consistency") {
  MapParams p(0.5, 1.0);
  OrbitLattice lat = build_lattice_auto(p, 4000, 1e8);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(lat.e0 + 1e-6, 1.0 - 1e-6);
  for (long long m : {2LL, 3LL, 7LL, 25LL, 100LL}) {
    for (int i = 0; i < 20; ++i) {
      double z = u(rng);
      double d = 0;
      double y = lat.return_branch_inv(m, z, &d);
      CHECK(y > lat.y[m]);
      CHECK(y <= lat.y[m - 1] + 1e-12);
      // forward check with derivative accumulated independently
      long double v = y, dp = 1.0L;
      for (long long s = 0; s < m; ++s) {
        dp *= map_deriv_ld(p, v);
        v = map_eval_ld(p, v);
      }
      CHECK(std::fabs((double)v - z) < 1e-9);
      CHECK(std::fabs((double)dp - d) / d < 1e-9);
    }
  }
}

TEST_CASE("depth-unreachable") {
  MapParams p(0.5, 1.0);
  CHECK_THROWS_AS(build_lattice(p, 4000, 10000, 1e6), std::runtime_error);
}
