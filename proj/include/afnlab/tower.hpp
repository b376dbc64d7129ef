#pragma once

#include "afnlab/grid.hpp"
#include "afnlab/schedule.hpp"
#include "afnlab/ulam.hpp"

#include <functional>
#include <vector>

namespace afn {

// Discrete tower over the induced map F on a base grid of Y.  Each base
// cell c carries a laminar column of height min(phi_c, j_max+1); the tower
// map shifts columns up one level per step and re-enters the base through
// the mu0-weighted transition Q when a column tops out at its true phi.
// Cells whose schedule cell exceeds the enumeration cap get phi = kOvercap
// and never return within a simulation.
struct TowerModel {
  static constexpr long long kOvercap = (1LL << 62);

  Grid base;
  long long j_max = 0;
  std::vector<long long> phi;     // per base cell
  std::vector<long long> height;  // min(phi, j_max+1)
  std::vector<double> mass0;      // mu0 mass per base cell
  UlamOperator Q;                 // row-stochastic F-transition (mu0 weights)

  size_t cells() const { return base.cells(); }
  std::vector<size_t> col_off;    // slot offset per cell
  size_t slots = 0;

  double total_mass() const;          // sum over slots of level measure
  double truncated_column_mass() const;  // mass of columns cut by j_max
};

TowerModel build_tower(const MapParams& p, const OrbitLattice& lat,
                       const ReturnSchedule& sched, const CumulativeMeasure& mu0,
                       const Grid& base, long long j_max);

// Mass state on the tower with O(1) level shift (per-column rings).
class TowerState {
public:
  explicit TowerState(const TowerModel& tm);
  void clear();
  double& at(size_t cell, long long level);        // current-time addressing
  double get(size_t cell, long long level) const;
  void add_base(const std::vector<double>& v);     // add to level 0
  void read_base(std::vector<double>& out) const;  // copy level 0
  // One step of the tower transfer operator.  recirculate=false absorbs
  // returning mass into `returned` instead of re-entering the base.
  void step(bool recirculate = true, std::vector<double>* returned = nullptr);
  double lost_mass() const { return lost_; }       // pushed past j_max
  double dot(const std::vector<double>& trace) const;
  double l1() const;
  const std::vector<double>& slots() const { return s_; }
  // valid only at time 0, when the ring layout is level-major
  void load_levelmajor(const std::vector<double>& v);
  long long time() const { return t_; }

private:
  const TowerModel* tm_;
  std::vector<double> s_;
  std::vector<double> ret_, inflow_;
  long long t_ = 0;
  double lost_ = 0;
  size_t idx(size_t cell, long long level) const;
};

// Per-slot traces of an observable along the columns: value of
// g(f^level(xi)) averaged over quadrature nodes xi of the base cell.
std::vector<double> make_trace(const TowerModel& tm, const MapParams& p,
                               const std::function<double(double)>& g);

// Renewal family: R_n = Q masked to source cells with phi = n.
// apply_R(n, v) consumes v and yields the arriving base vector.
struct OperatorFamily {
  const TowerModel* tm = nullptr;
  std::vector<std::vector<uint32_t>> cells_by_phi;  // index: phi value <= cap
  long long phi_max = 0;
  void apply_R(long long n, const std::vector<double>& v,
               std::vector<double>& out) const;
  // T*_n u by the convolution recursion T*_n = sum_j R_j T*_{n-j}.
  std::vector<std::vector<double>> T_sequence(const std::vector<double>& u,
                                              long long n_max) const;
  // T*_n u read off a direct tower walk.
  std::vector<std::vector<double>> T_direct(const std::vector<double>& u,
                                            long long n_max) const;
};

OperatorFamily operator_family(const TowerModel& tm);

// || sum_{n<=N} R_n 1 - Q 1 ||_1-style sparsity/partition check.
double renewal_mask_residual(const OperatorFamily& fam);

// Exact induced-l1 operator norm of T*_n - sum_j R_j T*_{n-j}, direct tower
// walk vs convolution recursion, over the full basis (blocked dense sweep).
std::vector<double> renewal_identity_residuals(const OperatorFamily& fam,
                                               long long n_max);

// Residuals of L^n v = sum_{n1+n2+n3=n} A_{n1} T*_{n2} B_{n3} v + C_n v.
struct DecompositionReport {
  std::vector<double> residual;       // per n, l1 over the tower
  std::vector<double> trunc_budget;   // mass lost past j_max on either route
};
DecompositionReport check_decomposition(const TowerModel& tm,
                                        const std::vector<double>& v_slots,
                                        long long n_max);

// |int L v * w dmu - int v * (w o T) dmu| on the tower.
double tower_duality_residual(const TowerModel& tm, const std::vector<double>& v,
                              const std::vector<double>& w);

// sum_n z^n R_n as a row-substochastic matrix (P2 finite shadow).
UlamOperator truncated_Rz(const TowerModel& tm, double z);

// sup over cells a of ||R(1_a 1)||_inf-density / mu0(a)  (P3 finite shadow).
double r_localization_constant(const TowerModel& tm);

} // namespace afn
