#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "afnlab/schedule.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace afn;

namespace {
struct Fixture {
  MapParams p{0.5, 1.0};
  OrbitLattice lat;
  ReturnSchedule sched;
  Fixture() : lat(build_lattice_auto(p, 4000, 1e9)), sched(build_schedule(p, lat, 512)) {}
};
Fixture& fix() {
  static Fixture f;
  return f;
}
} // namespace

TEST_CASE("partition covers Y up to the reported remainder") {
  auto& f = fix();
  double ylen = 1.0 - f.lat.e0;
  double total = f.sched.covered_length + f.sched.uncovered_length +
                 (1.0 - f.sched.k_tail_left);
  CHECK(std::fabs(total - ylen) < 1e-10);
  // cells are disjoint and ordered
  for (size_t i = 1; i < f.sched.cells.size(); ++i)
    CHECK(f.sched.cells[i].left >= f.sched.cells[i - 1].right - 1e-15);
}

TEST_CASE("rho-(k+1) cells are nested in [e_k, e_{k+1})") {
  auto& f = fix();
  for (const auto& c : f.sched.cells) {
    CHECK(c.left >= f.lat.e[c.k] - 1e-14);
    CHECK(c.right <= f.lat.e[c.k + 1] + 1e-14);
    CHECK(c.phi == f.lat.tau1[c.k] + c.m);  // integer identity
    CHECK(c.rho() == c.k + 1);
  }
  // first family: rho = 1 and phi = tau inside [e0, e1)
  const auto& c0 = f.sched.cells.front();
  CHECK(c0.rho() == 1);
  CHECK(c0.phi == c0.m);
}

TEST_CASE("onto branches: endpoints map to e0 and 1") {
  auto& f = fix();
  int checked = 0;
  for (const auto& c : f.sched.cells) {
    if (c.right - c.left < 1e-7 || c.phi > 64) continue;
    long double lo = c.left, hi = c.right;
    for (long long s = 0; s < c.phi; ++s) {
      lo = map_eval_ld(f.p, lo);
      hi = map_eval_ld(f.p, hi);
    }
    // the left endpoint is the phi-return preimage of e0; the right endpoint
    // belongs to the neighbour, so its image approaches the other end of Y
    CHECK(std::fabs((double)lo - f.lat.e0) < 1e-8);
    CHECK((double)hi > 1.0 - 1e-4);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("locate finds the right cell") {
  auto& f = fix();
  for (size_t i = 0; i < f.sched.cells.size(); i += 7) {
    const auto& c = f.sched.cells[i];
    long long j = f.sched.locate(0.5 * (c.left + c.right));
    REQUIRE(j >= 0);
    CHECK((size_t)j == i);
  }
  CHECK(f.sched.locate(f.lat.e0) == -1);  // uncovered sliver at e0
}

TEST_CASE("gibbs-markov certificate") {
  auto& f = fix();
  GibbsMarkovCertificate cert = certify_gibbs_markov(f.p, f.lat, f.sched, 4000, 2);
  CHECK(cert.distortion_C > 0);
  CHECK(cert.distortion_C < 50.0);  // finite and stable at this scale
  CHECK(cert.theta > 0);
  CHECK(cert.theta < 1.0);
  CHECK(cert.min_image_measure > 0.99);  // onto branches
  GibbsMarkovCertificate more = certify_gibbs_markov(f.p, f.lat, f.sched, 8000, 3);
  CHECK(more.distortion_C < 1.5 * cert.distortion_C + 1.0);
}

TEST_CASE("export round trip") {
  auto& f = fix();
  std::filesystem::create_directories("tmp_sched");
  export_schedule_csv(f.sched, f.lat, "tmp_sched/schedule.csv");
  export_schedule_json(f.sched, f.lat, "tmp_sched/schedule.json");
  std::ifstream csv("tmp_sched/schedule.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "left,right,rho,phi,tau_seq");
  size_t lines = 0;
  std::string line;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == f.sched.cells.size());
}
