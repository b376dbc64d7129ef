#include "afnlab/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace afn {

double tau_star_point(const OrbitLattice& lat, double x, long long cap) {
  if (x >= lat.e0) return 1.0;
  if (x <= 0.0) return (double)cap;
  if (x < lat.x.back()) return (double)cap;
  return 1.0 + (double)lat.ladder_index(x);
}

TauStarField tau_star_field(const OrbitLattice& lat, const Grid& g, long long cap) {
  TauStarField f;
  f.grid = g;
  f.value.resize(g.cells());
  for (size_t i = 0; i < g.cells(); ++i)
    f.value[i] = tau_star_point(lat, g.mid(i), cap);
  return f;
}

namespace {

double sup_star_on_grid(const Observable& v, const NormConfig& cfg,
                        const OrbitLattice& lat, const Grid& g) {
  double sup = 0;
  for (size_t i = 0; i < g.cells(); ++i) {
    double x = g.mid(i);
    double ts = tau_star_point(lat, x, cfg.tau_star_cap);
    sup = std::max(sup, std::fabs(v.eval(x)) * std::pow(ts, 1.0 + cfg.epsilon));
  }
  return sup;
}

} // namespace

WeightedNorms weighted_norms(const Observable& v, const NormConfig& cfg,
                             const MapParams& p, const OrbitLattice& lat,
                             const ReturnSchedule& sched, std::uint64_t seed) {
  WeightedNorms wn;
  // refinement ladder for the sup norm, graded toward the fixed point
  double sup_prev = 0;
  for (int level = 0; level < 3; ++level) {
    size_t n = 4096u << level;
    Grid g = Grid::graded(0.0, 1.0, n, 3.0);
    double s = sup_star_on_grid(v, cfg, lat, g);
    if (level == 2 && sup_prev > 0) wn.refinement_growth = s / sup_prev;
    sup_prev = (level == 1) ? s : sup_prev;
    wn.sup_star = s;
  }
  wn.bounded = wn.refinement_growth < 1.10;

  {
    Grid g = Grid::graded(0.0, 1.0, 8192, 3.0);
    double s = 0;
    for (size_t i = 1; i < g.cells(); ++i) {
      double x = g.mid(i);
      s = std::max(s, std::pow(x, -(1.0 + cfg.epsilon) / p.beta) * std::fabs(v.eval(x)));
    }
    wn.sup_star_scaling = s;
  }

  // Lipschitz part: sampled pair quotients along cylinders
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.1, 0.9);
  auto F_step = [&](double x) -> double {
    long long ci = sched.locate(x);
    if (ci < 0) return -1.0;
    const ScheduleCell& c = sched.cells[ci];
    long double z = x;
    for (long long s = 0; s < c.phi; ++s) z = map_eval_ld(p, z);
    return (double)z;
  };
  auto separation = [&](double x, double xp) -> int {
    for (int s = 0; s < 64; ++s) {
      long long ca = sched.locate(x), cb = sched.locate(xp);
      if (ca < 0 || cb < 0) return s;
      if (ca != cb) return s;
      x = F_step(x);
      xp = F_step(xp);
      if (x < 0 || xp < 0) return s + 1;
    }
    return 64;
  };
  size_t n_cells = sched.cells.size();
  size_t stride = std::max<size_t>(1, n_cells / 160);
  double lip = 0;
  for (size_t ci = 0; ci < n_cells; ci += stride) {
    const ScheduleCell& c = sched.cells[ci];
    double w = c.right - c.left;
    if (w < 1e-9) continue;
    for (int rep = 0; rep < 4; ++rep) {
      double xa = c.left + w * u01(rng);
      double xb = c.left + w * u01(rng);
      if (std::fabs(xa - xb) < 0.05 * w) continue;
      int s = separation(xa, xb);
      double th = std::pow(cfg.theta, s);
      // walk the pair along the cylinder, weighting by tau* at each image
      long double pa = xa, pb = xb;
      for (long long i = 0; i < c.phi; ++i) {
        double ts = tau_star_point(lat, 0.5 * ((double)pa + (double)pb),
                                   cfg.tau_star_cap);
        double q = std::pow(ts, 1.0 + cfg.epsilon) *
                   std::fabs(v.eval((double)pa) - v.eval((double)pb)) / th;
        lip = std::max(lip, q);
        pa = map_eval_ld(p, pa);
        pb = map_eval_ld(p, pb);
      }
    }
  }
  wn.lip_star = lip;
  return wn;
}

std::vector<double> correlation_operator(const UlamOperator& map_op,
                                         const Observable& v, const Observable& w,
                                         const DensityVector& mu, long long n_max) {
  const Grid& g = map_op.grid;
  size_t N = g.cells();
  std::vector<double> m(N), wbar(N), next;
  for (size_t i = 0; i < N; ++i) {
    double a = g.left(i), b = g.right(i);
    double vb = (v.eval(a) + 4.0 * v.eval(0.5 * (a + b)) + v.eval(b)) / 6.0;
    wbar[i] = (w.eval(a) + 4.0 * w.eval(0.5 * (a + b)) + w.eval(b)) / 6.0;
    m[i] = vb * mu.weights[i] * g.width(i);
  }
  std::vector<double> rho((size_t)n_max + 1);
  for (long long n = 0; n <= n_max; ++n) {
    double acc = 0;
    for (size_t i = 0; i < N; ++i) acc += m[i] * wbar[i];
    rho[(size_t)n] = acc;
    if (n < n_max) {
      map_op.apply_transpose(m, next);
      m.swap(next);
    }
  }
  return rho;
}

McCorrelation correlation_montecarlo(const MapParams& p, const Observable& v,
                                     const Observable& w,
                                     const std::vector<long long>& n_list,
                                     long long samples, long long burn_in,
                                     std::uint64_t seed) {
  McCorrelation mc;
  mc.n = n_list;
  long long n_max = 0;
  for (long long n : n_list) n_max = std::max(n_max, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  double x = u01(rng);
  for (long long i = 0; i < burn_in; ++i) x = map_eval(p, x);

  size_t L = (size_t)n_max + 1;
  std::vector<double> ring(L, 0.0);
  const int nbatch = 32;
  long long batch_len = samples / nbatch + 1;
  std::vector<std::vector<double>> acc(nbatch, std::vector<double>(n_list.size(), 0));
  std::vector<std::vector<long long>> cnt(nbatch,
                                          std::vector<long long>(n_list.size(), 0));
  std::vector<double> sv(nbatch, 0), sw(nbatch, 0);
  std::vector<long long> scnt(nbatch, 0);

  for (long long t = 0; t < samples; ++t) {
    double vx = v.eval(x);
    double wx = w.eval(x);
    ring[(size_t)(t % (long long)L)] = vx;
    int batch = (int)std::min<long long>(t / batch_len, nbatch - 1);
    sv[batch] += vx;
    sw[batch] += wx;
    ++scnt[batch];
    for (size_t k = 0; k < n_list.size(); ++k) {
      long long n = n_list[k];
      if (t >= n) {
        acc[batch][k] += ring[(size_t)((t - n) % (long long)L)] * wx;
        ++cnt[batch][k];
      }
    }
    x = map_eval(p, x);
  }
  mc.rho.resize(n_list.size());
  mc.se.resize(n_list.size());
  double svt = 0, swt = 0;
  long long sct = 0;
  for (int b = 0; b < nbatch; ++b) {
    svt += sv[b];
    swt += sw[b];
    sct += scnt[b];
  }
  mc.int_v = svt / (double)sct;
  mc.int_w = swt / (double)sct;
  for (size_t k = 0; k < n_list.size(); ++k) {
    std::vector<double> bmeans;
    for (int b = 0; b < nbatch; ++b)
      if (cnt[b][k] > 64) bmeans.push_back(acc[b][k] / (double)cnt[b][k]);
    double m = 0;
    for (double bm : bmeans) m += bm;
    m /= bmeans.size();
    double var = 0;
    for (double bm : bmeans) var += (bm - m) * (bm - m);
    mc.rho[k] = m;
    mc.se[k] = bmeans.size() > 1
                   ? std::sqrt(var / (bmeans.size() * (bmeans.size() - 1.0)))
                   : 1.0;
  }
  return mc;
}

long long q_formula(double beta) {
  long long q = 0;
  for (long long j = 0; j < 1 << 20; ++j) {
    if (2.0 * (double)(j + 1) * beta > 2.0 * (double)j + 1.0)
      q = j + 1;
    else
      break;
  }
  return q;
}

DecayPrediction predict_finite(const TailSeries& tphi, const MeanData& means,
                               double int_v_mu, double int_w_mu, long long n_max,
                               double beta) {
  DecayPrediction dp;
  dp.finite_mode = true;
  dp.int_v = int_v_mu;
  dp.int_w = int_w_mu;
  if (beta > 2.0) {
    dp.error_label = "n^-beta";
    dp.error_exponent = beta;
  } else if (beta == 2.0) {
    dp.error_label = "n^-2 log n";
    dp.error_exponent = 2.0;
  } else {
    dp.error_label = "n^-(2beta-2)";
    dp.error_exponent = 2.0 * beta - 2.0;
  }
  // tail sums with power-law extension beyond the stored range
  size_t J = tphi.n_max();
  LinFit lf = loglog_fit(tphi.value, J / 2, J);
  double bhat = -lf.slope, chat = std::exp(lf.intercept);
  double ext = (bhat > 1.0) ? chat * std::pow((double)J, 1.0 - bhat) / (bhat - 1.0)
                            : 0.0;
  std::vector<double> suffix(J + 2, 0.0);
  suffix[J + 1] = ext;
  for (size_t j = J + 1; j-- > 1;) suffix[j] = suffix[j + 1] + tphi.value[j];
  dp.leading.resize((size_t)n_max + 1, 0.0);
  for (long long n = 0; n <= n_max; ++n) {
    size_t idx = std::min<size_t>((size_t)n + 1, J + 1);
    dp.leading[(size_t)n] = suffix[idx] / means.phi_bar * int_v_mu * int_w_mu;
  }
  return dp;
}

DecayPrediction predict_infinite(double beta, double int_v_muX, double int_w_muX,
                                 long long n_max) {
  if (!(beta > 0.5 && beta < 1.0))
    throw std::invalid_argument("predict_infinite: beta must be in (1/2,1)");
  DecayPrediction dp;
  dp.finite_mode = false;
  dp.int_v = int_v_muX;
  dp.int_w = int_w_muX;
  dp.q = q_formula(beta);
  dp.d0 = std::sin(M_PI * beta) / M_PI;
  dp.error_exponent = beta - 0.5;
  dp.error_label = "n^-(beta-1/2)";
  dp.leading.resize((size_t)n_max + 1, 0.0);
  for (long long n = 1; n <= n_max; ++n)
    dp.leading[(size_t)n] =
        dp.d0 * std::pow((double)n, beta - 1.0) * int_v_muX * int_w_muX;
  return dp;
}

double mu_x_integral(const TowerModel& tm, const MapParams& p,
                     const std::function<double(double)>& g, double* tail_est) {
  std::vector<double> tr = make_trace(tm, p, g);
  long long jmax = 0;
  for (size_t c = 0; c < tm.cells(); ++c) jmax = std::max(jmax, tm.height[c]);
  std::vector<double> level_sum((size_t)jmax, 0.0);
  for (size_t c = 0; c < tm.cells(); ++c)
    for (long long i = 0; i < tm.height[c]; ++i)
      level_sum[(size_t)i] += tr[tm.col_off[c] + (size_t)i] * tm.mass0[c];
  double s_full = 0, s_half = 0;
  for (long long j = 0; j < jmax; ++j) {
    s_full += level_sum[(size_t)j];
    if (j < jmax / 2) s_half = s_full;
  }
  double richardson = s_full + (s_full - s_half);
  if (tail_est) *tail_est = std::fabs(s_full - s_half);
  return richardson;
}

InfiniteCorrelation correlation_infinite(const MapParams& p, const TowerModel& tm,
                                         const Observable& v, const Observable& w,
                                         const std::vector<long long>& n_report) {
  InfiniteCorrelation ic;
  ic.n = n_report;
  std::vector<double> vt = make_trace(tm, p, v.eval);
  std::vector<double> wt = make_trace(tm, p, w.eval);
  double wmax = 0;
  for (double x : wt) wmax = std::max(wmax, std::fabs(x));
  ic.int_v = mu_x_integral(tm, p, v.eval);
  ic.int_w = mu_x_integral(tm, p, w.eval);

  TowerState st(tm);
  std::vector<double> init(tm.slots);
  for (size_t c = 0; c < tm.cells(); ++c)
    for (long long i = 0; i < tm.height[c]; ++i) {
      size_t s = tm.col_off[c] + (size_t)i;
      init[s] = vt[s] * tm.mass0[c];
    }
  st.load_levelmajor(init);

  long long n_max = 0;
  for (long long n : n_report) n_max = std::max(n_max, n);
  size_t next = 0;
  ic.rho.resize(n_report.size());
  ic.budget.resize(n_report.size());
  for (long long t = 0; t <= n_max; ++t) {
    while (next < n_report.size() && n_report[next] == t) {
      ic.rho[next] = st.dot(wt);
      ic.budget[next] =
          st.lost_mass() * wmax + tm.Q.remainder_total * std::fabs(ic.rho[next]);
      if (ic.budget[next] > 0.2 * std::fabs(ic.rho[next]))
        ic.truncation_dominated = true;
      ++next;
    }
    if (t < n_max) st.step(true);
  }
  return ic;
}

} // namespace afn
