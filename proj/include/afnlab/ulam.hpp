#pragma once

#include "afnlab/grid.hpp"
#include "afnlab/lattice.hpp"
#include "afnlab/schedule.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace afn {

enum class OperatorKind { MapF, FirstReturn, InducedF, TruncatedRz, Control };

// A monotone increasing branch of an interval map, realized by `steps`
// iterations of f (or by a custom single-step map).  Branches too narrow to
// contain a grid breakpoint are assembled through a shared image profile
// instead of forward orbits, which would be unstable there.
struct UlamBranch {
  double a = 0, b = 0;
  double img_lo = 0, img_hi = 0;
  long long steps = 1;
  int profile_id = -1;
};

struct BranchProfile {
  std::vector<double> z;    // image-space nodes, increasing
  std::vector<double> pdf;  // piecewise-linear density, integrates to 1
};

struct BranchSet {
  MapParams params{1.0, 1.0};
  std::vector<UlamBranch> branches;  // ascending by domain
  std::vector<BranchProfile> profiles;
  std::function<double(double, double*)> custom_step;  // Control maps
  std::function<int(double)> uncovered_profile;        // profile id for gaps

  double forward(double x, long long steps, double* deriv) const;
};

BranchSet map_branchset(const MapParams& p, double e0);
BranchSet first_return_branchset(const OrbitLattice& lat, long long m_cap);
BranchSet induced_branchset(const OrbitLattice& lat, const ReturnSchedule& sched);
BranchSet doubling_branchset();

// Row-stochastic transition matrix on `grid` (CSR).  Entry (i,j) is the
// fraction of cell i's source mass carried into cell j; source mass is
// Lebesgue unless src_weight is given.  Mass from rows the branch set does
// not cover is spread through the uncovered profile (or the row itself)
// and accounted in remainder_total.
struct UlamOperator {
  OperatorKind kind = OperatorKind::MapF;
  Grid grid;
  std::vector<size_t> rowptr;
  std::vector<uint32_t> col;
  std::vector<double> val;
  double remainder_total = 0;
  long long flagged_rows = 0;

  size_t n() const { return grid.cells(); }
  size_t nnz() const { return val.size(); }
  // mass flow: out[j] = sum_i in[i] * P[i][j]
  void apply_transpose(const std::vector<double>& in, std::vector<double>& out) const;
  // function flow: out[i] = sum_j P[i][j] * in[j]
  void apply(const std::vector<double>& in, std::vector<double>& out) const;
  double max_row_sum_dev() const;
};

UlamOperator assemble_ulam(const BranchSet& bs, const Grid& grid, OperatorKind kind,
                           const CumulativeMeasure* src_weight = nullptr);

// Normalized invariant density by power iteration on the mass flow.
DensityVector invariant_density(const UlamOperator& op, int max_iter = 20000,
                                double tol = 1e-13);

struct SpectralReport {
  double leading = 0;         // Rayleigh estimate for the top eigenvalue
  double second_modulus = 0;  // |lambda_2| from deflated iteration
  double gap = 0;             // 1 - |lambda_2|
  int iterations = 0;
};
SpectralReport spectral_report(const UlamOperator& op, std::uint64_t seed = 7);

struct DualityReport {
  double lhs = 0, rhs = 0, residual = 0, bracket = 0;
};
// Checks  int (L v) w dLeb  ==  int v (w o T) dLeb  by independent quadrature.
DualityReport duality_residual(const UlamOperator& op, const BranchSet& bs,
                               const std::function<double(double)>& v,
                               const std::function<double(double)>& w);

// Level measures m_j(A) = mu0(f^{-j} A ∩ {phi > j}) for j <= j_max, pushed
// onto xgrid; level_total[j] = mu0(phi > j).
struct PushupResult {
  std::vector<double> level_total;
  std::vector<double> partial_sum;    // running sums of level_total
  Grid xgrid;
  std::vector<double> accumulated;    // sum_j m_j as cell masses on xgrid
  double uncovered_mass = 0;          // per-level upper bracket
};
PushupResult pushup_measure(const MapParams& p, const ReturnSchedule& sched,
                            const CumulativeMeasure& mu0, long long j_max,
                            const Grid& xgrid);

} // namespace afn
