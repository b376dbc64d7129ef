#include "afnlab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace afn {

long long ReturnSchedule::locate(double y) const {
  if (cells.empty()) return -1;
  auto it = std::upper_bound(cells.begin(), cells.end(), y,
                             [](double v, const ScheduleCell& c) { return v < c.left; });
  if (it == cells.begin()) return -1;
  --it;
  if (y < it->right) return it - cells.begin();
  return -1;
}

ReturnSchedule build_schedule(const MapParams& p, const OrbitLattice& lat,
                              long long phi_cap) {
  if (phi_cap < 2) throw std::invalid_argument("build_schedule: phi_cap too small");
  ReturnSchedule s;
  s.params = p;
  s.e0 = lat.e0;
  s.phi_cap = phi_cap;
  s.k_tail_left = 1.0;

  int K = lat.depth_k();
  for (int k = 0; k + 1 <= K; ++k) {
    long long t_k = lat.tau1[k];
    int sig = lat.sigma[k + 1];
    if (t_k + sig + 1 > phi_cap) break;  // whole level beyond the cap
    ScheduleLevel lv;
    lv.k = k;
    lv.t_k = t_k;
    lv.sigma_next = sig;
    lv.e_k = lat.e[k];
    lv.e_k1 = lat.e[k + 1];
    lv.m_min = sig + 1;
    lv.m_max = std::min(phi_cap - t_k, lat.depth_n());
    // boundary for m runs m_max .. m_min-1 ascending in position
    lv.bnd.resize((size_t)(lv.m_max - lv.m_min + 2));
    for (long long m = lv.m_max; m >= lv.m_min - 1; --m) {
      double bmy = (m == lv.m_min - 1) ? lat.e[k + 1] : lat.k_chain_inv(k, lat.y[m]);
      lv.bnd[(size_t)(lv.m_max - m)] = bmy;
    }
    // enforce monotonicity against rounding
    for (size_t i = 1; i < lv.bnd.size(); ++i)
      if (lv.bnd[i] < lv.bnd[i - 1]) lv.bnd[i] = lv.bnd[i - 1];
    lv.uncovered_len = std::max(0.0, lv.bnd[0] - lv.e_k);
    s.uncovered_length += lv.uncovered_len;
    s.k_tail_left = lat.e[k + 1];
    s.levels.push_back(std::move(lv));
  }
  if (s.levels.empty())
    throw std::runtime_error("build_schedule: no level fits under phi_cap");

  for (const auto& lv : s.levels) {
    for (long long m = lv.m_max; m >= lv.m_min; --m) {
      ScheduleCell c;
      c.left = lv.bnd[(size_t)(lv.m_max - m)];
      c.right = lv.bnd[(size_t)(lv.m_max - m + 1)];
      c.k = lv.k;
      c.m = m;
      c.phi = lv.t_k + m;
      if (c.right > c.left) {
        s.covered_length += c.right - c.left;
        s.cells.push_back(c);
      }
    }
  }
  std::sort(s.cells.begin(), s.cells.end(),
            [](const ScheduleCell& a, const ScheduleCell& b) { return a.left < b.left; });
  return s;
}

GibbsMarkovCertificate certify_gibbs_markov(const MapParams& p,
                                            const OrbitLattice& lat,
                                            const ReturnSchedule& sched,
                                            long long sample_budget,
                                            std::uint64_t seed) {
  GibbsMarkovCertificate cert;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  const double Ylen = 1.0 - sched.e0;

  // Cells wider than this have a forward-stable branch map.
  const double min_width = 1e-9;
  std::vector<size_t> idx;
  for (size_t i = 0; i < sched.cells.size(); ++i)
    if (sched.cells[i].right - sched.cells[i].left > min_width) idx.push_back(i);
  if (idx.empty()) return cert;

  auto fwd = [&](double x0, long long steps, long double* logd) -> double {
    long double v = x0;
    long double ld = 0.0L;
    for (long long i = 0; i < steps; ++i) {
      ld += logl(map_deriv_ld(p, v));
      v = map_eval_ld(p, v);
    }
    *logd = ld;
    return (double)v;
  };

  long long per_cell = std::max<long long>(1, sample_budget / (long long)idx.size());
  for (size_t ci : idx) {
    const ScheduleCell& c = sched.cells[ci];
    double w = c.right - c.left;
    cert.theta = std::max(cert.theta, w / Ylen);
    long double lg;
    double img_lo = fwd(c.left + 1e-3 * w, c.phi, &lg);
    double img_hi = fwd(c.right - 1e-3 * w, c.phi, &lg);
    cert.min_image_measure =
        (cert.cells_sampled == 0)
            ? (img_hi - img_lo) / Ylen
            : std::min(cert.min_image_measure, (img_hi - img_lo) / Ylen);
    ++cert.cells_sampled;
    for (long long t = 0; t < per_cell; ++t) {
      double xa = c.left + w * unif(rng);
      double xb = c.left + w * unif(rng);
      if (std::fabs(xa - xb) < 0.05 * w) continue;
      long double la, lb;
      double Fa = fwd(xa, c.phi, &la);
      double Fb = fwd(xb, c.phi, &lb);
      double dF = std::fabs(Fa - Fb);
      if (dF < 1e-12) continue;
      double q = std::fabs((double)(la - lb)) / dF;
      cert.distortion_C = std::max(cert.distortion_C, q);
      cert.max_cylinder_ratio =
          std::max(cert.max_cylinder_ratio, std::exp(std::fabs((double)(la - lb))));
      ++cert.pairs_sampled;
    }
    if (cert.pairs_sampled >= sample_budget) break;
  }
  return cert;
}

namespace {
std::string tau_seq_string(const OrbitLattice& lat, const ScheduleCell& c) {
  std::ostringstream os;
  for (int j = 1; j <= c.k; ++j) {
    os << lat.tau1[j] << ';';
  }
  os << c.phi;
  return os.str();
}
} // namespace

void export_schedule_csv(const ReturnSchedule& s, const OrbitLattice& lat,
                         const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "left,right,rho,phi,tau_seq\n";
  char buf[64];
  for (const auto& c : s.cells) {
    snprintf(buf, sizeof buf, "%.17g", c.left);
    f << buf << ',';
    snprintf(buf, sizeof buf, "%.17g", c.right);
    f << buf << ',' << c.rho() << ',' << c.phi << ',' << tau_seq_string(lat, c) << '\n';
  }
}

void export_schedule_json(const ReturnSchedule& s, const OrbitLattice& lat,
                          const std::string& path) {
  nlohmann::ordered_json j;
  j["alpha"] = s.params.alpha;
  j["b"] = s.params.b;
  j["phi_cap"] = s.phi_cap;
  j["covered_length"] = s.covered_length;
  j["uncovered_length"] = s.uncovered_length;
  char buf[64];
  auto hexf = [&](double v) {
    snprintf(buf, sizeof buf, "%a", v);
    return std::string(buf);
  };
  j["e0_hex"] = hexf(s.e0);
  auto& arr = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : s.cells) {
    nlohmann::ordered_json jc;
    jc["left_hex"] = hexf(c.left);
    jc["right_hex"] = hexf(c.right);
    jc["rho"] = c.rho();
    jc["phi"] = c.phi;
    jc["tau_seq"] = tau_seq_string(lat, c);
    arr.push_back(std::move(jc));
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << j.dump(1) << '\n';
}

} // namespace afn
