#include "afnlab/tails.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace afn {

bool TailSeries::nonincreasing(double tol) const {
  for (size_t n = 1; n < value.size(); ++n)
    if (value[n] > value[n - 1] + tol) return false;
  return true;
}

namespace {

// mu0-mass of {phi > n} within level lv, split into (certain, uncertain).
struct PieceMass {
  double certain = 0;
  double uncertain = 0;
};

PieceMass level_piece(const ScheduleLevel& lv, const CumulativeMeasure& mu0,
                      long long n, long long phi_cap) {
  PieceMass pm;
  double sliver = mu0.mass(lv.e_k, lv.bnd[0]);
  if (n <= lv.t_k + lv.sigma_next) {
    pm.certain = mu0.mass(lv.e_k, lv.e_k1);
    return pm;
  }
  long long j = n - lv.t_k;
  if (j <= lv.m_max) {
    double right = lv.bnd[(size_t)(lv.m_max - j)];
    pm.certain = mu0.mass(lv.e_k, right);
    return pm;
  }
  // only the sliver is left; it is certain while n <= phi_cap
  if (n <= phi_cap) pm.certain = sliver;
  else pm.uncertain = sliver;
  return pm;
}

} // namespace

TailSeries tail_phi(const ReturnSchedule& sched, const CumulativeMeasure& mu0,
                    size_t n_max) {
  if ((long long)n_max > sched.phi_cap)
    throw std::runtime_error("insufficient-coverage: n_max exceeds phi_cap");
  TailSeries t;
  t.kind = TailKind::Phi0;
  t.normalization = mu0.total();
  t.provenance = "schedule-interval integration";
  t.value.resize(n_max + 1);
  t.lo.resize(n_max + 1);
  t.hi.resize(n_max + 1);
  double ktail = mu0.mass(sched.k_tail_left, 1.0);
  for (size_t n = 0; n <= n_max; ++n) {
    double certain = 0, uncertain = 0;
    for (const auto& lv : sched.levels) {
      PieceMass pm = level_piece(lv, mu0, (long long)n, sched.phi_cap);
      certain += pm.certain;
      uncertain += pm.uncertain;
    }
    certain += ktail;  // phi beyond every enumerated level
    t.value[n] = certain;
    t.lo[n] = certain;
    t.hi[n] = certain + uncertain;
  }
  return t;
}

TailSeries tail_tau(const OrbitLattice& lat, const CumulativeMeasure& mu_tau,
                    size_t n_max) {
  if ((long long)n_max > lat.depth_n())
    throw std::runtime_error("lattice-depth-exceeded: tau tail beyond y-ladder");
  TailSeries t;
  t.kind = TailKind::TauTau;
  t.normalization = mu_tau.total();
  t.provenance = "y-ladder integration";
  t.value.resize(n_max + 1);
  t.lo = t.hi = t.value;
  for (size_t n = 0; n <= n_max; ++n) {
    double v;
    if ((long long)n < lat.y_first)
      v = mu_tau.total();
    else
      v = mu_tau.mass(lat.e0, lat.y[n]);
    t.value[n] = v;
    t.lo[n] = v;
    t.hi[n] = v;
  }
  return t;
}

TailFit fit_tail(const TailSeries& t, size_t n_lo, size_t n_hi, double beta_pinned) {
  TailFit f;
  n_hi = std::min(n_hi, t.n_max());
  f.window_lo = n_lo;
  f.window_hi = n_hi;
  f.beta_pinned = beta_pinned;
  LinFit ll = loglog_fit(t.value, n_lo, n_hi);
  f.beta_hat = -ll.slope;
  f.c_hat = std::exp(ll.intercept);

  // limit extrapolation of c = lim n^beta v_n with the leading correction
  // shape g(n) as regressor
  std::vector<double> g(t.value.size(), 0.0);
  for (size_t n = 1; n < g.size(); ++n) {
    double corr = std::min(2.0 * beta_pinned, beta_pinned + 1.0) - beta_pinned;
    g[n] = std::pow((double)n, -corr);
    if (beta_pinned + 1.0 <= 2.0 * beta_pinned) g[n] *= std::log((double)n);
  }
  LimitFit lf = limit_fit(t.value, beta_pinned, g, n_lo, n_hi);
  f.c_limit = lf.a;

  auto residual_fit = [&](double c, double beta) {
    std::vector<double> r(t.value.size(), 0.0);
    double peak = 0;
    for (size_t n = n_lo; n <= n_hi; ++n) {
      r[n] = std::fabs(t.value[n] - c * std::pow((double)n, -beta));
      peak = std::max(peak, r[n]);
    }
    // drop near-zero crossings that would dominate the log fit
    for (size_t n = n_lo; n <= n_hi; ++n)
      if (r[n] < 1e-3 * peak) r[n] = 0.0;
    LinFit rf = loglog_fit(r, n_lo, n_hi);
    return -rf.slope;
  };
  f.residual_exponent = residual_fit(f.c_hat, f.beta_hat);
  f.residual_exponent_limit = residual_fit(f.c_limit, beta_pinned);
  return f;
}

H1Report check_H1(const ReturnSchedule& sched, const CumulativeMeasure& mu0,
                  size_t n_max, size_t fit_lo) {
  if ((long long)n_max > sched.phi_cap)
    throw std::runtime_error("insufficient-coverage: n_max exceeds phi_cap");
  H1Report rep;
  rep.ratio.resize(n_max + 1);
  double ktail = mu0.mass(sched.k_tail_left, 1.0);
  int k_last = sched.levels.empty() ? 0 : sched.levels.back().k + 1;
  for (size_t n = 0; n <= n_max; ++n) {
    double num = (double)(k_last + 1) * ktail;
    double den = ktail;
    for (const auto& lv : sched.levels) {
      PieceMass pm = level_piece(lv, mu0, (long long)n, sched.phi_cap);
      num += (double)(lv.k + 1) * (pm.certain + pm.uncertain);
      den += pm.certain + pm.uncertain;
    }
    rep.ratio[n] = den > 0 ? num / den : 0.0;
    rep.sup_ratio = std::max(rep.sup_ratio, rep.ratio[n]);
  }
  rep.window_lo = fit_lo;
  rep.window_hi = (size_t)(0.9 * (double)n_max);
  LinFit lf = loglog_fit(rep.ratio, rep.window_lo, rep.window_hi);
  rep.trend_slope = lf.slope;
  return rep;
}

namespace {

double rho_bar_from(const ReturnSchedule& sched, const CumulativeMeasure& mu0) {
  double rb = 0;
  for (const auto& lv : sched.levels)
    rb += (double)(lv.k + 1) * mu0.mass(lv.e_k, lv.e_k1);
  int k_last = sched.levels.empty() ? 0 : sched.levels.back().k + 1;
  rb += (double)(k_last + 1) * mu0.mass(sched.k_tail_left, 1.0);
  return rb;
}

} // namespace

CompareReturns compare_returns(const ReturnSchedule& sched, const OrbitLattice& lat,
                               const CumulativeMeasure& mu0,
                               const CumulativeMeasure& mu_tau, size_t j_max,
                               double density_rel_err) {
  CompareReturns cr;
  cr.rho_bar = rho_bar_from(sched, mu0);
  TailSeries tphi = tail_phi(sched, mu0, j_max);
  TailSeries ttau = tail_tau(lat, mu_tau, j_max);
  cr.lhs.resize(j_max + 1);
  cr.rhs_sum1.resize(j_max + 1);
  cr.rhs_sum2.resize(j_max + 1);
  cr.budget.resize(j_max + 1);
  double ktail = mu0.mass(sched.k_tail_left, 1.0);
  for (size_t j = 0; j <= j_max; ++j) {
    cr.lhs[j] = tphi.value[j] / cr.rho_bar - ttau.value[j];
    double s1 = 0, s2 = 0, trunc = 0;
    for (const auto& lv : sched.levels) {
      // sum1: cells with j >= m > j - t_k inside level k
      long long ma = std::max<long long>((long long)j - lv.t_k + 1, lv.m_min);
      long long mb = std::min<long long>((long long)j, lv.m_max);
      if (mb >= ma) {
        double left = lv.bnd[(size_t)(lv.m_max - mb)];
        double right = lv.bnd[(size_t)(lv.m_max - (ma - 1))];
        s1 += mu0.mass(left, right);
      }
      if ((long long)j > lv.m_max && (long long)j - lv.t_k <= lv.m_max) {
        // part of the indicator range falls into the uncovered sliver
        trunc += mu0.mass(lv.e_k, lv.bnd[0]);
      }
      // sum2: [e_{k+1}, G_k(y_j)) when j < sigma_{k+1}
      if ((long long)j >= 1 && (long long)j < lv.sigma_next) {
        double w_k = (double)lat.one_orbit[lv.k];
        double yj = lat.y[j];
        double hi2 = (std::isnan(yj) || yj >= w_k) ? 1.0
                                                   : lat.k_chain_inv(lv.k, yj);
        s2 += mu0.mass(lv.e_k1, hi2);
      }
    }
    cr.rhs_sum1[j] = s1 / cr.rho_bar;
    cr.rhs_sum2[j] = s2 / cr.rho_bar;
    cr.budget[j] = density_rel_err * (tphi.value[j] / cr.rho_bar + ttau.value[j] +
                                      cr.rhs_sum1[j] + cr.rhs_sum2[j]) +
                   (trunc + ktail) / cr.rho_bar +
                   (tphi.hi[j] - tphi.lo[j]) / cr.rho_bar;
  }
  return cr;
}

CorollaryBound corollary_bound(const ReturnSchedule& sched, const OrbitLattice& lat,
                               const CumulativeMeasure& mu0,
                               const CumulativeMeasure& mu_tau, size_t n_lo,
                               size_t n_hi, const MeanData& means) {
  CorollaryBound cb;
  cb.phi_bar = means.phi_bar;
  cb.tau_bar = means.tau_bar;
  size_t j_sum = (size_t)std::min<long long>(sched.phi_cap, lat.depth_n());
  TailSeries tphi = tail_phi(sched, mu0, j_sum);
  TailSeries ttau = tail_tau(lat, mu_tau, j_sum);
  cb.lhs_sum.resize(n_hi + 1, 0.0);
  cb.rhs_bound.resize(n_hi + 1, 0.0);
  cb.margin.resize(n_hi + 1, 0.0);
  for (size_t n = n_lo; n <= n_hi; ++n) {
    double s = 0;
    for (size_t j = n; j <= j_sum; ++j)
      s += tphi.value[j] / cb.phi_bar - ttau.value[j] / cb.tau_bar;
    cb.lhs_sum[n] = std::fabs(s);
    double r = 0;
    for (const auto& lv : sched.levels) {
      if (lv.k == 0) continue;
      PieceMass pm = level_piece(lv, mu0, (long long)n, sched.phi_cap);
      r += (double)lv.t_k * (pm.certain + pm.uncertain);
    }
    // the k-tail has tau_k >= t at its last enumerated level
    r += (double)(sched.levels.empty() ? 0 : sched.levels.back().t_k) *
         mu0.mass(sched.k_tail_left, 1.0);
    cb.rhs_bound[n] = r / cb.phi_bar;
    cb.margin[n] = cb.rhs_bound[n] - cb.lhs_sum[n];
  }
  return cb;
}

MeanData estimate_means(const ReturnSchedule& sched, const OrbitLattice& lat,
                        const CumulativeMeasure& mu0,
                        const CumulativeMeasure& mu_tau) {
  MeanData md;
  size_t j_sum = (size_t)std::min<long long>(sched.phi_cap, lat.depth_n());
  TailSeries tphi = tail_phi(sched, mu0, j_sum);
  TailSeries ttau = tail_tau(lat, mu_tau, j_sum);
  double sp = 0, st = 0;
  for (size_t j = 0; j <= j_sum; ++j) {
    sp += tphi.value[j];
    st += ttau.value[j];
  }
  // power-law extension of the truncated sums
  auto extend = [&](const TailSeries& t, double beta_guess) {
    size_t hi = t.n_max();
    size_t lo = hi / 2;
    LinFit lf = loglog_fit(t.value, lo, hi);
    double beta = -lf.slope;
    if (!(beta > 1.0)) beta = std::max(1.05, beta_guess);
    double c = std::exp(lf.intercept);
    return c * std::pow((double)hi, 1.0 - beta) / (beta - 1.0);
  };
  double ep = extend(tphi, 2.0), et = extend(ttau, 2.0);
  md.phi_bar = sp + ep;
  md.phi_bar_err = 0.5 * ep + 1e-3 * sp;
  md.tau_bar = st + et;
  md.tau_bar_err = 0.5 * et + 1e-3 * st;
  md.rho_bar = rho_bar_from(sched, mu0);
  md.rho_bar_err = 1e-3 * md.rho_bar + mu0.mass(sched.k_tail_left, 1.0);
  return md;
}

McTails mc_return_tails(const MapParams& p, const OrbitLattice& lat,
                        const ReturnSchedule& sched, long long steps,
                        size_t n_max, std::uint64_t seed, long long burn_in) {
  McTails mc;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.05, 0.95);
  double x = u01(rng);
  for (long long i = 0; i < burn_in; ++i) x = map_eval(p, x);
  const double e0 = lat.e0;

  const int nbatch = 32;
  std::vector<std::vector<double>> tau_hist(nbatch, std::vector<double>(n_max + 2, 0));
  std::vector<std::vector<double>> phi_hist(nbatch, std::vector<double>(n_max + 2, 0));
  std::vector<long long> tau_cnt(nbatch, 0), phi_cnt(nbatch, 0);

  // run to the first Y-visit
  long long t = 0;
  while (x < e0 && t < steps) {
    x = map_eval(p, x);
    ++t;
  }
  long long rho_left = 0;   // tau-returns left in the current F-block
  long long phi_acc = 0;    // accumulated tau within the block
  long long phi_block = 0;  // phi looked up at block start
  bool block_valid = false;
  long long batch_len = steps / nbatch + 1;

  while (t < steps) {
    int batch = (int)std::min<long long>(t / batch_len, nbatch - 1);
    if (rho_left == 0) {
      long long ci = sched.locate(x);
      if (ci >= 0) {
        const ScheduleCell& c = sched.cells[ci];
        rho_left = c.rho();
        phi_block = c.phi;
        phi_acc = 0;
        block_valid = true;
      } else {
        rho_left = 1;  // uncovered start: consume one return, no phi sample
        block_valid = false;
      }
    }
    // one first return
    long long tau = 0;
    do {
      x = map_eval(p, x);
      ++t;
      ++tau;
    } while (x < e0 && t < steps);
    if (x < e0) break;  // budget exhausted mid-return
    size_t ti = std::min<size_t>((size_t)tau, n_max + 1);
    tau_hist[batch][ti] += 1;
    ++tau_cnt[batch];
    phi_acc += tau;
    --rho_left;
    if (rho_left == 0 && block_valid) {
      if (phi_acc == phi_block) {
        size_t pi = std::min<size_t>((size_t)phi_acc, n_max + 1);
        phi_hist[batch][pi] += 1;
        ++phi_cnt[batch];
      }
      // mismatches (cell-boundary rounding) are silently dropped
    }
  }

  auto reduce = [&](std::vector<std::vector<double>>& hist,
                    std::vector<long long>& cnt, std::vector<double>& tail,
                    std::vector<double>& se, long long& total) {
    tail.assign(n_max + 1, 0.0);
    se.assign(n_max + 1, 0.0);
    total = 0;
    std::vector<std::vector<double>> btail(nbatch, std::vector<double>(n_max + 1, 0));
    std::vector<int> used;
    for (int bi = 0; bi < nbatch; ++bi) {
      if (cnt[bi] < 16) continue;
      used.push_back(bi);
      total += cnt[bi];
      double acc = 0;
      for (size_t n = n_max + 1; n-- > 0;) {
        acc += hist[bi][n + 1];
        btail[bi][n] = acc / (double)cnt[bi];
      }
    }
    if (used.empty()) return;
    for (size_t n = 0; n <= n_max; ++n) {
      double m = 0;
      for (int bi : used) m += btail[bi][n];
      m /= used.size();
      double v = 0;
      for (int bi : used) v += (btail[bi][n] - m) * (btail[bi][n] - m);
      tail[n] = m;
      se[n] = used.size() > 1 ? std::sqrt(v / (used.size() * (used.size() - 1.0)))
                              : 1.0;
    }
  };
  reduce(tau_hist, tau_cnt, mc.tau_tail, mc.tau_tail_se, mc.tau_samples);
  reduce(phi_hist, phi_cnt, mc.phi_tail, mc.phi_tail_se, mc.phi_samples);
  return mc;
}

void export_tail_csv(const TailSeries& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "n,value,lower_bracket,upper_bracket\n";
  char buf[64];
  for (size_t n = 0; n < t.value.size(); ++n) {
    f << n;
    for (double v : {t.value[n], t.lo[n], t.hi[n]}) {
      snprintf(buf, sizeof buf, "%.17g", v);
      f << ',' << buf;
    }
    f << '\n';
  }
}

} // namespace afn
