#pragma once

#include "afnlab/lattice.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace afn {

// One Markov cell of the general-return map F = f^phi.  The cell lies in
// [e_k, e_{k+1}); its reinduce time is rho = k+1, its return time is
// phi = tau1[k] + m, and F maps it onto Y through the branch chain
// (sigma_1, ..., sigma_k, m).
struct ScheduleCell {
  double left, right;
  int k;
  long long m;
  long long phi;
  int rho() const { return k + 1; }
};

// Per-k bookkeeping: ascending boundary array over [e_k, e_{k+1}) plus the
// sliver [e_k, bnd[0]) whose phi exceeds the enumeration cap.
struct ScheduleLevel {
  int k = 0;
  long long t_k = 0;       // tau1[k]
  int sigma_next = 0;      // sigma[k+1]
  double e_k = 0, e_k1 = 0;
  long long m_min = 0;     // = sigma_next + 1
  long long m_max = 0;     // largest enumerated m
  // bnd[i] = left endpoint of cell m = m_max - i;  bnd.back() = e_{k+1}.
  // Cell m spans [bnd[m_max - m], bnd[m_max - m + 1]).
  std::vector<double> bnd;
  double uncovered_len = 0;  // length of [e_k, bnd[0])
};

struct ReturnSchedule {
  MapParams params{1.0, 1.0};
  double e0 = 0;
  long long phi_cap = 0;
  std::vector<ScheduleLevel> levels;
  std::vector<ScheduleCell> cells;  // ascending by left endpoint
  double covered_length = 0;
  double uncovered_length = 0;  // within enumerated levels
  double k_tail_left = 1.0;     // [k_tail_left, 1) beyond the last level
  int k_levels() const { return (int)levels.size(); }

  // Cell containing y, or -1 when y falls in an uncovered sliver.
  long long locate(double y) const;
};

ReturnSchedule build_schedule(const MapParams& p, const OrbitLattice& lat,
                              long long phi_cap);

// Empirical Gibbs-Markov data measured on the schedule.
struct GibbsMarkovCertificate {
  double distortion_C = 0;       // sup |log DF(x)/DF(y)| / |F(x)-F(y)| over sampled pairs
  double theta = 0;              // max cell contraction |cell| / |F(cell)|
  double min_image_measure = 0;  // min over cells of Lebesgue |F(cell)| / |Y|
  double max_cylinder_ratio = 0; // sup of DF ratios within a cell
  long long pairs_sampled = 0;
  long long cells_sampled = 0;
};

GibbsMarkovCertificate certify_gibbs_markov(const MapParams& p,
                                            const OrbitLattice& lat,
                                            const ReturnSchedule& sched,
                                            long long sample_budget,
                                            std::uint64_t seed = 1);

// CSV columns: left,right,rho,phi,tau_seq (semicolon-joined); JSON mirror
// stores the endpoints as hex floats for full precision.
void export_schedule_csv(const ReturnSchedule& s, const OrbitLattice& lat,
                         const std::string& path);
void export_schedule_json(const ReturnSchedule& s, const OrbitLattice& lat,
                          const std::string& path);

} // namespace afn
