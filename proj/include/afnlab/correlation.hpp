#pragma once

#include "afnlab/grid.hpp"
#include "afnlab/lattice.hpp"
#include "afnlab/schedule.hpp"
#include "afnlab/tails.hpp"
#include "afnlab/tower.hpp"
#include "afnlab/ulam.hpp"

#include <functional>
#include <string>
#include <vector>

namespace afn {

struct Observable {
  std::string name;
  std::function<double(double)> eval;
  enum class Support { WholeSpace, BaseOnly } support = Support::WholeSpace;
};

struct NormConfig {
  double epsilon = 0.1;
  double theta = 0.5;            // separation-metric base, from the certificate
  long long tau_star_cap = 100000;
};

// tau*(x) = 1 + min{ i >= 0 : f^i(x) in Y }, resolved against the x-ladder.
double tau_star_point(const OrbitLattice& lat, double x, long long cap);

struct TauStarField {
  Grid grid;
  std::vector<double> value;
};
TauStarField tau_star_field(const OrbitLattice& lat, const Grid& g, long long cap);

struct WeightedNorms {
  double sup_star = 0;
  double lip_star = 0;
  double sup_star_scaling = 0;  // sup x^{-(1+eps)/beta} |v(x)| cross-check
  bool bounded = true;
  double refinement_growth = 1;  // sup ratio across grid refinements
};
WeightedNorms weighted_norms(const Observable& v, const NormConfig& cfg,
                             const MapParams& p, const OrbitLattice& lat,
                             const ReturnSchedule& sched, std::uint64_t seed = 3);

// rho_n = int v * (w o f^n) dmu by iterating the Ulam mass flow of f.
std::vector<double> correlation_operator(const UlamOperator& map_op,
                                         const Observable& v, const Observable& w,
                                         const DensityVector& mu, long long n_max);

struct McCorrelation {
  std::vector<long long> n;
  std::vector<double> rho, se;
  double int_v = 0, int_w = 0;
};
McCorrelation correlation_montecarlo(const MapParams& p, const Observable& v,
                                     const Observable& w,
                                     const std::vector<long long>& n_list,
                                     long long samples, long long burn_in,
                                     std::uint64_t seed);

// q = number of integer orders admitted by 2(j+1)beta > 2j+1, evaluated from
// j = 0 upward (the admissible set is downward closed).
long long q_formula(double beta);

struct DecayPrediction {
  bool finite_mode = true;
  std::vector<double> leading;   // indexed by n
  double int_v = 0, int_w = 0;
  double error_exponent = 0;     // modulus of the theory error term
  std::string error_label;
  long long q = 0;
  double d0 = 0;
};

DecayPrediction predict_finite(const TailSeries& tphi, const MeanData& means,
                               double int_v_mu, double int_w_mu, long long n_max,
                               double beta);
DecayPrediction predict_infinite(double beta, double int_v_muX, double int_w_muX,
                                 long long n_max);

// int g dmu_X by truncated level sums with a Richardson tail estimate.
double mu_x_integral(const TowerModel& tm, const MapParams& p,
                     const std::function<double(double)>& g, double* tail_est = nullptr);

struct InfiniteCorrelation {
  std::vector<long long> n;
  std::vector<double> rho;
  std::vector<double> budget;
  double int_v = 0, int_w = 0;
  bool truncation_dominated = false;
};
// rho_n = int_tower L^n v_tower * w_tower dmuTower on the truncated tower.
InfiniteCorrelation correlation_infinite(const MapParams& p, const TowerModel& tm,
                                         const Observable& v, const Observable& w,
                                         const std::vector<long long>& n_report);

} // namespace afn
