#pragma once

#include "afnlab/fit.hpp"
#include "afnlab/grid.hpp"
#include "afnlab/lattice.hpp"
#include "afnlab/schedule.hpp"

#include <string>
#include <vector>

namespace afn {

enum class TailKind { Phi0, TauTau, Custom };

// A nonincreasing tail sequence value[n] with lower/upper truncation
// brackets and mass bookkeeping.
struct TailSeries {
  TailKind kind = TailKind::Custom;
  std::vector<double> value;  // index n = 0 .. n_max
  std::vector<double> lo, hi;
  double normalization = 1.0;
  std::string provenance;

  size_t n_max() const { return value.size() - 1; }
  bool nonincreasing(double tol = 1e-12) const;
};

struct TailFit {
  double beta_hat = 0;      // log-log slope magnitude
  double c_hat = 0;         // log-log intercept constant
  double c_limit = 0;       // extrapolated limit of n^beta * value[n]
  double residual_exponent = 0;        // vs c_hat * n^{-beta_hat}
  double residual_exponent_limit = 0;  // vs c_limit * n^{-beta_pinned}
  double beta_pinned = 0;
  size_t window_lo = 0, window_hi = 0;
};

// Least-squares tail fit over [n_lo, n_hi]; beta_pinned is the model
// exponent used for the limit extrapolation (pass the theoretical beta).
TailFit fit_tail(const TailSeries& t, size_t n_lo, size_t n_hi, double beta_pinned);

struct MeanData {
  double phi_bar = 0, phi_bar_err = 0;
  double tau_bar = 0, tau_bar_err = 0;
  double rho_bar = 0, rho_bar_err = 0;
};

// mu0(phi > n) from the schedule's per-level interval structure; mu0 is a
// CDF on Y (invariant density of F, or Lebesgue for exponent work).
TailSeries tail_phi(const ReturnSchedule& sched, const CumulativeMeasure& mu0,
                    size_t n_max);

// mu_tau(tau > n) = mu_tau((e0, y_n)).
TailSeries tail_tau(const OrbitLattice& lat, const CumulativeMeasure& mu_tau,
                    size_t n_max);

// r_n = (int_{phi>n} rho dmu0) / mu0(phi>n), with sup and log-log trend.
struct H1Report {
  std::vector<double> ratio;
  double sup_ratio = 0;
  double trend_slope = 0;  // of log r_n vs log n over the fit window
  size_t window_lo = 0, window_hi = 0;
};
H1Report check_H1(const ReturnSchedule& sched, const CumulativeMeasure& mu0,
                  size_t n_max, size_t fit_lo = 20);

// Both sides of the return-time comparison identity, per j:
//   lhs = (1/rho_bar) mu0(phi>j) - mu_tau(tau>j)
//   rhs = (1/rho_bar) sum_k [ A_k(j) - B_k(j) ]
// with A_k, B_k the two integral families over {phi = tau_{k+1}} and
// {phi > tau_{k+1}}.  Both sides are evaluated from the same schedule but
// with independently estimated mu0 and mu_tau.
struct CompareReturns {
  std::vector<double> lhs, rhs_sum1, rhs_sum2;
  double rho_bar = 0;
  std::vector<double> budget;  // declared per-j error budget
};
CompareReturns compare_returns(const ReturnSchedule& sched, const OrbitLattice& lat,
                               const CumulativeMeasure& mu0,
                               const CumulativeMeasure& mu_tau, size_t j_max,
                               double density_rel_err);

// Tail-sum comparison bound:
//   | sum_{j>=n} (1/phi_bar) mu0(phi>j) - (1/tau_bar) mu_tau(tau>j) |
//     <= (1/phi_bar) sum_{k>=1} int_{phi = tau_{k+1} > n} tau_k dmu0.
struct CorollaryBound {
  std::vector<double> lhs_sum, rhs_bound, margin;
  double phi_bar = 0, tau_bar = 0;
};
CorollaryBound corollary_bound(const ReturnSchedule& sched, const OrbitLattice& lat,
                               const CumulativeMeasure& mu0,
                               const CumulativeMeasure& mu_tau, size_t n_lo,
                               size_t n_hi, const MeanData& means);

MeanData estimate_means(const ReturnSchedule& sched, const OrbitLattice& lat,
                        const CumulativeMeasure& mu0, const CumulativeMeasure& mu_tau);

// Monte Carlo oracle: empirical return-time tails along one long orbit.
struct McTails {
  std::vector<double> tau_tail, tau_tail_se;
  std::vector<double> phi_tail, phi_tail_se;
  long long tau_samples = 0, phi_samples = 0;
};
McTails mc_return_tails(const MapParams& p, const OrbitLattice& lat,
                        const ReturnSchedule& sched, long long steps,
                        size_t n_max, std::uint64_t seed, long long burn_in = 10000);

void export_tail_csv(const TailSeries& t, const std::string& path);

} // namespace afn
