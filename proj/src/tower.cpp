#include "afnlab/tower.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace afn {

double TowerModel::total_mass() const {
  double s = 0;
  for (size_t c = 0; c < cells(); ++c) s += mass0[c] * (double)height[c];
  return s;
}

double TowerModel::truncated_column_mass() const {
  double s = 0;
  for (size_t c = 0; c < cells(); ++c)
    if (phi[c] > height[c]) s += mass0[c];
  return s;
}

TowerModel build_tower(const MapParams& p, const OrbitLattice& lat,
                       const ReturnSchedule& sched, const CumulativeMeasure& mu0,
                       const Grid& base, long long j_max) {
  (void)p;
  TowerModel tm;
  tm.base = base;
  tm.j_max = j_max;
  size_t N = base.cells();
  tm.phi.resize(N);
  tm.height.resize(N);
  tm.mass0.resize(N);
  for (size_t c = 0; c < N; ++c) {
    long long ci = sched.locate(base.mid(c));
    tm.phi[c] = (ci >= 0) ? sched.cells[ci].phi : TowerModel::kOvercap;
    tm.height[c] = std::min(tm.phi[c], j_max + 1);
    tm.mass0[c] = mu0.mass(base.left(c), base.right(c));
  }
  CumulativeMeasure srcw = mu0;
  BranchSet bs = induced_branchset(lat, sched);
  tm.Q = assemble_ulam(bs, base, OperatorKind::InducedF, &srcw);
  tm.col_off.resize(N + 1);
  size_t off = 0;
  for (size_t c = 0; c < N; ++c) {
    tm.col_off[c] = off;
    off += (size_t)tm.height[c];
  }
  tm.col_off[N] = off;
  tm.slots = off;
  return tm;
}

TowerState::TowerState(const TowerModel& tm) : tm_(&tm), s_(tm.slots, 0.0) {
  ret_.resize(tm.cells());
  inflow_.resize(tm.cells());
}

void TowerState::clear() {
  std::fill(s_.begin(), s_.end(), 0.0);
  t_ = 0;
  lost_ = 0;
}

void TowerState::load_levelmajor(const std::vector<double>& v) {
  if (t_ != 0) throw std::logic_error("load_levelmajor: state already stepped");
  if (v.size() != s_.size()) throw std::invalid_argument("load_levelmajor: size");
  s_ = v;
}

size_t TowerState::idx(size_t cell, long long level) const {
  long long h = tm_->height[cell];
  long long r = (level - t_) % h;
  if (r < 0) r += h;
  return tm_->col_off[cell] + (size_t)r;
}

double& TowerState::at(size_t cell, long long level) { return s_[idx(cell, level)]; }
double TowerState::get(size_t cell, long long level) const {
  return s_[idx(cell, level)];
}

void TowerState::add_base(const std::vector<double>& v) {
  for (size_t c = 0; c < tm_->cells(); ++c)
    if (v[c] != 0.0) s_[idx(c, 0)] += v[c];
}

void TowerState::read_base(std::vector<double>& out) const {
  out.resize(tm_->cells());
  for (size_t c = 0; c < tm_->cells(); ++c) out[c] = s_[idx(c, 0)];
}

void TowerState::step(bool recirculate, std::vector<double>* returned) {
  const TowerModel& tm = *tm_;
  size_t N = tm.cells();
  for (size_t c = 0; c < N; ++c) {
    size_t top = idx(c, tm.height[c] - 1);
    double m = s_[top];
    s_[top] = 0.0;
    if (tm.phi[c] == tm.height[c]) {
      ret_[c] = m;
    } else {
      ret_[c] = 0.0;  // truncated column: mass above j_max is lost
      lost_ += m;
    }
  }
  ++t_;  // the popped slot becomes the new level-0 slot
  if (recirculate) {
    tm.Q.apply_transpose(ret_, inflow_);
    for (size_t c = 0; c < N; ++c)
      if (inflow_[c] != 0.0) s_[idx(c, 0)] += inflow_[c];
  } else if (returned) {
    tm.Q.apply_transpose(ret_, *returned);
  }
}

double TowerState::dot(const std::vector<double>& trace) const {
  double s = 0;
  // traces are stored level-major per column in construction order; convert
  // through the ring offset
  const TowerModel& tm = *tm_;
  for (size_t c = 0; c < tm.cells(); ++c) {
    long long h = tm.height[c];
    size_t base = tm.col_off[c];
    long long r0 = (-t_) % h;
    if (r0 < 0) r0 += h;
    for (long long i = 0; i < h; ++i) {
      size_t si = base + (size_t)((r0 + i) % h);
      if (s_[si] != 0.0) s += s_[si] * trace[base + (size_t)i];
    }
  }
  return s;
}

double TowerState::l1() const {
  double s = 0;
  for (double v : s_) s += std::fabs(v);
  return s;
}

std::vector<double> make_trace(const TowerModel& tm, const MapParams& p,
                               const std::function<double(double)>& g) {
  std::vector<double> tr(tm.slots, 0.0);
  const double nodes[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  for (size_t c = 0; c < tm.cells(); ++c) {
    double a = tm.base.left(c), w = tm.base.width(c);
    long long h = tm.height[c];
    for (int q = 0; q < 3; ++q) {
      double x = a + nodes[q] * w;
      for (long long i = 0; i < h; ++i) {
        tr[tm.col_off[c] + (size_t)i] += wts[q] * g(x);
        x = map_eval(p, x);
      }
    }
  }
  return tr;
}

OperatorFamily operator_family(const TowerModel& tm) {
  OperatorFamily fam;
  fam.tm = &tm;
  for (size_t c = 0; c < tm.cells(); ++c)
    if (tm.phi[c] != TowerModel::kOvercap)
      fam.phi_max = std::max(fam.phi_max, tm.phi[c]);
  fam.cells_by_phi.resize((size_t)fam.phi_max + 1);
  for (size_t c = 0; c < tm.cells(); ++c)
    if (tm.phi[c] != TowerModel::kOvercap)
      fam.cells_by_phi[(size_t)tm.phi[c]].push_back((uint32_t)c);
  return fam;
}

void OperatorFamily::apply_R(long long n, const std::vector<double>& v,
                             std::vector<double>& out) const {
  const TowerModel& tm = *this->tm;
  out.assign(tm.cells(), 0.0);
  if (n < 1 || n > phi_max) return;
  const auto& src = cells_by_phi[(size_t)n];
  for (uint32_t c : src) {
    double m = v[c];
    if (m == 0.0) continue;
    for (size_t k = tm.Q.rowptr[c]; k < tm.Q.rowptr[c + 1]; ++k)
      out[tm.Q.col[k]] += m * tm.Q.val[k];
  }
}

std::vector<std::vector<double>> OperatorFamily::T_sequence(
    const std::vector<double>& u, long long n_max) const {
  const TowerModel& tm = *this->tm;
  size_t N = tm.cells();
  std::vector<std::vector<double>> T((size_t)n_max + 1);
  T[0] = u;
  std::vector<double> gathered(N), arrived(N);
  for (long long n = 1; n <= n_max; ++n) {
    // row c of the convolution input is T_{n-phi_c}[c]
    std::fill(gathered.begin(), gathered.end(), 0.0);
    for (size_t c = 0; c < N; ++c) {
      long long j = tm.phi[c];
      if (j != TowerModel::kOvercap && j <= n) gathered[c] = T[(size_t)(n - j)][c];
    }
    tm.Q.apply_transpose(gathered, arrived);
    T[(size_t)n] = arrived;
  }
  return T;
}

std::vector<std::vector<double>> OperatorFamily::T_direct(
    const std::vector<double>& u, long long n_max) const {
  const TowerModel& tm = *this->tm;
  TowerState st(tm);
  st.add_base(u);
  std::vector<std::vector<double>> T((size_t)n_max + 1);
  T[0] = u;
  for (long long n = 1; n <= n_max; ++n) {
    st.step(true);
    st.read_base(T[(size_t)n]);
  }
  return T;
}

double renewal_mask_residual(const OperatorFamily& fam) {
  const TowerModel& tm = *fam.tm;
  size_t N = tm.cells();
  std::vector<double> ones(N, 1.0), acc(N, 0.0), out;
  for (long long n = 1; n <= fam.phi_max; ++n) {
    fam.apply_R(n, ones, out);
    for (size_t c = 0; c < N; ++c) acc[c] += out[c];
  }
  // compare against Q applied to the covered indicator
  std::vector<double> cov(N, 0.0), qc;
  for (size_t c = 0; c < N; ++c)
    if (tm.phi[c] != TowerModel::kOvercap) cov[c] = 1.0;
  tm.Q.apply_transpose(cov, qc);
  double r = 0;
  for (size_t c = 0; c < N; ++c) r += std::fabs(acc[c] - qc[c]);
  return r;
}

std::vector<double> renewal_identity_residuals(const OperatorFamily& fam,
                                               long long n_max) {
  const TowerModel& tm = *fam.tm;
  const size_t N = tm.cells();
  Eigen::MatrixXd Fd = Eigen::MatrixXd::Zero(N, N);  // flow: Fd(c', c)
  for (size_t r = 0; r < N; ++r)
    for (size_t k = tm.Q.rowptr[r]; k < tm.Q.rowptr[r + 1]; ++k)
      Fd((Eigen::Index)tm.Q.col[k], (Eigen::Index)r) = tm.Q.val[k];

  std::vector<double> residual((size_t)n_max + 1, 0.0);
  const size_t B = 128;
  std::vector<double> res_local((size_t)n_max + 1, 0.0);

  for (size_t b0 = 0; b0 < N; b0 += B) {
    size_t bw = std::min(B, N - b0);
    // direct route: blocked tower walk
    std::vector<Eigen::MatrixXd> Tdir((size_t)n_max + 1);
    {
      // state: per column ring of rows
      std::vector<Eigen::MatrixXd> cols(N);
      for (size_t c = 0; c < N; ++c)
        cols[c] = Eigen::MatrixXd::Zero((Eigen::Index)tm.height[c], bw);
      Eigen::MatrixXd base0 = Eigen::MatrixXd::Zero(N, bw);
      for (size_t j = 0; j < bw; ++j) base0((Eigen::Index)(b0 + j), j) = 1.0;
      Tdir[0] = base0;
      for (size_t c = 0; c < N; ++c) cols[c].row(0) = base0.row((Eigen::Index)c);
      Eigen::MatrixXd ret(N, bw), inflow(N, bw);
      long long t = 0;
      for (long long n = 1; n <= n_max; ++n) {
        for (size_t c = 0; c < N; ++c) {
          long long h = tm.height[c];
          long long top = (h - 1 - t) % h;
          if (top < 0) top += h;
          if (tm.phi[c] == h) {
            ret.row((Eigen::Index)c) = cols[c].row((Eigen::Index)top);
          } else {
            ret.row((Eigen::Index)c).setZero();
          }
          cols[c].row((Eigen::Index)top).setZero();
        }
        ++t;
        inflow.noalias() = Fd * ret;
        for (size_t c = 0; c < N; ++c) {
          long long h = tm.height[c];
          long long s0 = (-t) % h;
          if (s0 < 0) s0 += h;
          cols[c].row((Eigen::Index)s0) += inflow.row((Eigen::Index)c);
        }
        Tdir[(size_t)n] = inflow;  // base content at step n
      }
    }
    // independent convolution recursion from the R-family
    std::vector<Eigen::MatrixXd> Trec((size_t)n_max + 1);
    Trec[0] = Tdir[0];
    Eigen::MatrixXd M(N, bw);
    for (long long n = 1; n <= n_max; ++n) {
      M.setZero();
      for (size_t c = 0; c < N; ++c) {
        long long j = tm.phi[c];
        if (j != TowerModel::kOvercap && j <= n)
          M.row((Eigen::Index)c) = Trec[(size_t)(n - j)].row((Eigen::Index)c);
      }
      Trec[(size_t)n].noalias() = Fd * M;
      double worst = 0;
      for (size_t j = 0; j < bw; ++j) {
        double cs = (Trec[(size_t)n].col(j) - Tdir[(size_t)n].col(j)).lpNorm<1>();
        worst = std::max(worst, cs);
      }
      res_local[(size_t)n] = std::max(res_local[(size_t)n], worst);
    }
  }
  for (long long n = 0; n <= n_max; ++n)
    residual[(size_t)n] = res_local[(size_t)n];
  return residual;
}

DecompositionReport check_decomposition(const TowerModel& tm,
                                        const std::vector<double>& v_slots,
                                        long long n_max) {
  size_t N = tm.cells();
  DecompositionReport rep;
  rep.residual.assign((size_t)n_max + 1, 0.0);
  rep.trunc_budget.assign((size_t)n_max + 1, 0.0);

  // direct evolution of v
  TowerState direct(tm);
  direct.load_levelmajor(v_slots);

  // absorbed evolution of the off-base part: yields B_n v and C_n v
  TowerState absorbed(tm);
  std::vector<double> base_part(N, 0.0);
  std::vector<double> off_slots(tm.slots, 0.0);
  for (size_t c = 0; c < N; ++c) {
    size_t off = tm.col_off[c];
    base_part[c] = v_slots[off];
    for (long long i = 1; i < tm.height[c]; ++i)
      off_slots[off + (size_t)i] = v_slots[off + (size_t)i];
  }
  absorbed.load_levelmajor(off_slots);
  std::vector<std::vector<double>> Bv((size_t)n_max + 1);
  Bv[0] = base_part;

  // injected circulation: g_s = sum_{j<=s} T*_{s-j} B_j v
  TowerState inject(tm);
  std::vector<std::vector<double>> g((size_t)n_max + 1);
  inject.add_base(Bv[0]);
  inject.read_base(g[0]);

  std::vector<double> snapshot(tm.slots), expect(tm.slots);
  for (long long n = 1; n <= n_max; ++n) {
    direct.step(true);
    std::vector<double> bn(N);
    absorbed.step(false, &bn);
    Bv[(size_t)n] = bn;
    inject.step(true);
    inject.add_base(bn);
    inject.read_base(g[(size_t)n]);

    // assemble sum_{l+s=n} A_l g_s + C_n v in level-major layout
    std::fill(expect.begin(), expect.end(), 0.0);
    for (long long l = 0; l <= n; ++l) {
      const auto& gs = g[(size_t)(n - l)];
      for (size_t c = 0; c < N; ++c) {
        if (tm.phi[c] > l) {
          if (l < tm.height[c]) expect[tm.col_off[c] + (size_t)l] += gs[c];
        }
      }
    }
    for (size_t c = 0; c < N; ++c) {
      long long h = tm.height[c];
      for (long long i = 0; i < h; ++i)
        expect[tm.col_off[c] + (size_t)i] += absorbed.get(c, i);
    }
    // compare with the direct state (converted to level-major)
    double r = 0;
    for (size_t c = 0; c < N; ++c) {
      long long h = tm.height[c];
      for (long long i = 0; i < h; ++i)
        snapshot[tm.col_off[c] + (size_t)i] = direct.get(c, i);
    }
    for (size_t s = 0; s < tm.slots; ++s) r += std::fabs(snapshot[s] - expect[s]);
    rep.residual[(size_t)n] = r;
    rep.trunc_budget[(size_t)n] = direct.lost_mass() + absorbed.lost_mass() +
                                  inject.lost_mass();
  }
  return rep;
}

double tower_duality_residual(const TowerModel& tm, const std::vector<double>& v,
                              const std::vector<double>& w) {
  size_t N = tm.cells();
  // masses per slot: mass0[c] at every level of the column
  // LHS: evolve v-mass one step, pair with w
  TowerState st(tm);
  std::vector<double> init(tm.slots, 0.0);
  for (size_t c = 0; c < N; ++c)
    for (long long i = 0; i < tm.height[c]; ++i)
      init[tm.col_off[c] + (size_t)i] = v[tm.col_off[c] + (size_t)i] * tm.mass0[c];
  st.load_levelmajor(init);
  st.step(true);
  double lhs = st.dot(w);
  // RHS: sum v * (w o T) with (w o T)(c,i) = w(c,i+1) or returned through Q
  double rhs = 0;
  for (size_t c = 0; c < N; ++c) {
    long long h = tm.height[c];
    for (long long i = 0; i < h; ++i) {
      double wT;
      if (i + 1 < h) {
        wT = w[tm.col_off[c] + (size_t)(i + 1)];
      } else if (tm.phi[c] == h) {
        double acc = 0;
        for (size_t k = tm.Q.rowptr[c]; k < tm.Q.rowptr[c + 1]; ++k)
          acc += tm.Q.val[k] * w[tm.col_off[tm.Q.col[k]]];
        wT = acc;
      } else {
        wT = 0.0;  // truncated column top
      }
      rhs += v[tm.col_off[c] + (size_t)i] * wT * tm.mass0[c];
    }
  }
  return std::fabs(lhs - rhs);
}

UlamOperator truncated_Rz(const TowerModel& tm, double z) {
  if (!(z > 0.0 && z < 1.0))
    throw std::invalid_argument("truncated_Rz: z must be in (0,1)");
  UlamOperator op;
  op.kind = OperatorKind::TruncatedRz;
  op.grid = tm.base;
  op.rowptr.push_back(0);
  for (size_t r = 0; r < tm.cells(); ++r) {
    double f = (tm.phi[r] == TowerModel::kOvercap)
                   ? 0.0
                   : std::pow(z, (double)tm.phi[r]);
    for (size_t k = tm.Q.rowptr[r]; k < tm.Q.rowptr[r + 1]; ++k) {
      if (f > 0) {
        op.col.push_back(tm.Q.col[k]);
        op.val.push_back(f * tm.Q.val[k]);
      }
    }
    op.rowptr.push_back(op.col.size());
  }
  return op;
}

double r_localization_constant(const TowerModel& tm) {
  size_t N = tm.cells();
  double worst = 0;
  std::vector<double> v(N), out;
  for (size_t a = 0; a < N; a += std::max<size_t>(1, N / 256)) {
    if (tm.mass0[a] <= 0) continue;
    std::fill(v.begin(), v.end(), 0.0);
    v[a] = tm.mass0[a];
    tm.Q.apply_transpose(v, out);
    double sup_density = 0;
    for (size_t c = 0; c < N; ++c)
      if (tm.mass0[c] > 0)
        sup_density = std::max(sup_density, out[c] / tm.mass0[c]);
    worst = std::max(worst, sup_density / tm.mass0[a]);
  }
  return worst;
}

} // namespace afn
