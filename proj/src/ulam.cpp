#include "afnlab/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace afn {

double BranchSet::forward(double x, long long steps, double* deriv) const {
  if (custom_step) {
    double d = 1.0, dd = 1.0;
    for (long long i = 0; i < steps; ++i) {
      x = custom_step(x, &dd);
      d *= dd;
    }
    if (deriv) *deriv = d;
    return x;
  }
  if (!deriv) {
    long double v = x;
    for (long long i = 0; i < steps; ++i) v = map_eval_ld(params, v);
    return (double)v;
  }
  long double v = x;
  long double logd = 0.0L;
  for (long long i = 0; i < steps; ++i) {
    logd += logl(map_deriv_ld(params, v));
    v = map_eval_ld(params, v);
  }
  *deriv = (double)expl(logd);
  return (double)v;
}

BranchSet map_branchset(const MapParams& p, double e0) {
  BranchSet bs;
  bs.params = p;
  UlamBranch L{0.0, e0, 0.0, 1.0, 1, -1};
  UlamBranch R{e0, 1.0, 0.0, p.b, 1, -1};
  bs.branches = {L, R};
  return bs;
}

namespace {

// Image-density profile of the branch inverse g: pdf(z) dz proportional to
// g'(z) = 1 / Df(g(z)); computed through the stable inverse chain.
BranchProfile make_profile(const OrbitLattice& lat, int k, long long m_ref,
                           double img_lo, double img_hi) {
  const int nodes = 129;
  BranchProfile pr;
  pr.z.resize(nodes);
  pr.pdf.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    double z = img_lo + (img_hi - img_lo) * (double(i) / (nodes - 1));
    if (i == 0) z = img_lo + 1e-12;
    if (i == nodes - 1) z = img_hi - 1e-12;
    double d = 1.0;
    double u = lat.return_branch_inv(m_ref, z, &d);
    if (k > 0) {
      double d2 = 1.0;
      lat.k_chain_inv(k, u, &d2);
      // position unused; chain derivative at u
      d *= d2;
    }
    pr.z[i] = z;
    pr.pdf[i] = 1.0 / d;
  }
  // normalize to unit integral (trapezoid on the pwl density)
  double tot = 0;
  for (int i = 0; i + 1 < nodes; ++i)
    tot += 0.5 * (pr.pdf[i] + pr.pdf[i + 1]) * (pr.z[i + 1] - pr.z[i]);
  for (auto& v : pr.pdf) v /= tot;
  return pr;
}

} // namespace

BranchSet first_return_branchset(const OrbitLattice& lat, long long m_cap) {
  BranchSet bs;
  bs.params = lat.params;
  const double e0 = lat.e0;
  long long m_hi = std::min(m_cap, lat.depth_n());
  double w1 = (double)lat.one_orbit[1];
  long long mref = std::min<long long>(m_hi, std::max<long long>(64, 2 * lat.y_first));
  bs.profiles.push_back(make_profile(lat, 0, mref, e0, 1.0));
  for (long long m = lat.y_first; m <= m_hi; ++m) {
    UlamBranch br;
    br.a = lat.y[m];
    br.b = (m == lat.y_first) ? 1.0 : lat.y[m - 1];
    br.img_lo = e0;
    br.img_hi = (m == lat.y_first) ? w1 : 1.0;
    br.steps = m;
    br.profile_id = 0;
    bs.branches.push_back(br);
  }
  std::sort(bs.branches.begin(), bs.branches.end(),
            [](const UlamBranch& x, const UlamBranch& y) { return x.a < y.a; });
  bs.uncovered_profile = [](double) { return 0; };
  return bs;
}

BranchSet induced_branchset(const OrbitLattice& lat, const ReturnSchedule& sched) {
  BranchSet bs;
  bs.params = lat.params;
  const double e0 = lat.e0;
  std::vector<double> level_left;  // e_k per level, for uncovered lookup
  for (const auto& lv : sched.levels) {
    long long mref = std::min<long long>(
        lv.m_max, std::max<long long>(64, 2 * (long long)lv.sigma_next));
    mref = std::max(mref, lv.m_min);
    bs.profiles.push_back(make_profile(lat, lv.k, mref, e0, 1.0));
    level_left.push_back(lv.e_k);
  }
  for (const auto& c : sched.cells) {
    UlamBranch br;
    br.a = c.left;
    br.b = c.right;
    br.img_lo = e0;
    br.img_hi = 1.0;
    br.steps = c.phi;
    br.profile_id = c.k;
    bs.branches.push_back(br);
  }
  // cells are already ascending
  bs.uncovered_profile = [level_left](double x) {
    auto it = std::upper_bound(level_left.begin(), level_left.end(), x);
    if (it == level_left.begin()) return 0;
    return (int)(it - level_left.begin() - 1);
  };
  return bs;
}

BranchSet doubling_branchset() {
  BranchSet bs;
  bs.custom_step = [](double x, double* d) {
    if (d) *d = 2.0;
    double y = 2.0 * x;
    return y >= 1.0 ? y - 1.0 : y;
  };
  bs.branches.push_back({0.0, 0.5, 0.0, 1.0, 1, -1});
  bs.branches.push_back({0.5, 1.0, 0.0, 1.0, 1, -1});
  return bs;
}

namespace {

// Monotone cubic Hermite h(0)=0, h(1)=1 with endpoint slopes s0, s1; finds
// t with h(t) = u by a few Newton steps.  Used to place preimages of grid
// boundaries inside a sub-piece without extra root solves.
double inv_hermite(double u, double s0, double s1) {
  if (!(s0 > 1e-8 && s0 < 1e8 && s1 > 1e-8 && s1 < 1e8)) return u;
  double c2 = 3.0 - 2.0 * s0 - s1;
  double c3 = s0 + s1 - 2.0;
  double t = u;
  for (int it = 0; it < 4; ++it) {
    double h = t * (s0 + t * (c2 + t * c3)) - u;
    double dh = s0 + t * (2.0 * c2 + 3.0 * t * c3);
    if (dh <= 1e-12) break;
    double tn = t - h / dh;
    if (tn < 0.0) tn = 0.0;
    if (tn > 1.0) tn = 1.0;
    if (tn == t) break;
    t = tn;
  }
  return t;
}

struct RowAccumulator {
  size_t n;
  std::vector<double> scratch;
  explicit RowAccumulator(size_t n_) : n(n_), scratch(n_, 0.0) {}
  void add(size_t j, double v) { scratch[j] += v; }
  void flush(std::vector<size_t>& rowptr, std::vector<uint32_t>& col,
             std::vector<double>& val) {
    for (size_t j = 0; j < n; ++j) {
      if (scratch[j] != 0.0) {
        col.push_back((uint32_t)j);
        val.push_back(scratch[j]);
        scratch[j] = 0.0;
      }
    }
    rowptr.push_back(col.size());
  }
};

} // namespace

UlamOperator assemble_ulam(const BranchSet& bs, const Grid& grid, OperatorKind kind,
                           const CumulativeMeasure* src_weight) {
  const size_t N = grid.cells();
  CumulativeMeasure leb = CumulativeMeasure::lebesgue(grid.lo, grid.hi);
  const CumulativeMeasure& srcw = src_weight ? *src_weight : leb;

  // profile column masses on this grid
  std::vector<std::vector<double>> prof_cols;
  for (const auto& pr : bs.profiles) {
    std::vector<double> cm(N, 0.0);
    for (size_t s = 0; s + 1 < pr.z.size(); ++s) {
      double z0 = pr.z[s], z1 = pr.z[s + 1];
      double p0 = pr.pdf[s], p1 = pr.pdf[s + 1];
      size_t j0 = grid.locate(z0), j1 = grid.locate(z1);
      for (size_t j = j0; j <= j1; ++j) {
        double a = std::max(z0, grid.left(j));
        double b = std::min(z1, grid.right(j));
        if (b <= a) continue;
        double pa = p0 + (p1 - p0) * (a - z0) / (z1 - z0);
        double pb = p0 + (p1 - p0) * (b - z0) / (z1 - z0);
        cm[j] += 0.5 * (pa + pb) * (b - a);
      }
    }
    double tot = 0;
    for (double v : cm) tot += v;
    if (tot > 0)
      for (double& v : cm) v /= tot;
    prof_cols.push_back(std::move(cm));
  }

  // per-row accumulation; rows are visited in ascending order because the
  // branches are ascending
  std::vector<std::vector<std::pair<uint32_t, double>>> rows(N);
  auto add_entry = [&](size_t r, size_t j, double v) {
    rows[r].push_back({(uint32_t)j, v});
  };
  auto add_profile = [&](size_t r, int pid, double massv) {
    const auto& cm = prof_cols[pid];
    auto& rr = rows[r];
    for (size_t j = 0; j < N; ++j)
      if (cm[j] > 0) rr.push_back({(uint32_t)j, massv * cm[j]});
  };

  std::vector<double> fwd_pts, fwd_img, fwd_der;
  for (const auto& br : bs.branches) {
    if (br.b <= br.a) continue;
    // interior grid breakpoints strictly inside (a,b)
    size_t ilo = std::upper_bound(grid.bp.begin(), grid.bp.end(), br.a) - grid.bp.begin();
    size_t ihi = std::lower_bound(grid.bp.begin(), grid.bp.end(), br.b) - grid.bp.begin();
    bool resolved = ilo < ihi;
    if (!resolved) {
      size_t r = grid.locate(0.5 * (br.a + br.b));
      double ms = srcw.mass(br.a, br.b);
      if (ms <= 0) continue;
      if (br.profile_id >= 0) {
        add_profile(r, br.profile_id, ms);
      } else {
        // linear spread over the exact image
        size_t j0 = grid.locate(br.img_lo), j1 = grid.locate(br.img_hi);
        double iw = br.img_hi - br.img_lo;
        for (size_t j = j0; j <= j1; ++j) {
          double a = std::max(br.img_lo, grid.left(j));
          double b2 = std::min(br.img_hi, grid.right(j));
          if (b2 > a) add_entry(r, j, ms * (b2 - a) / iw);
        }
      }
      continue;
    }
    fwd_pts.assign(1, br.a);
    for (size_t i = ilo; i < ihi; ++i) fwd_pts.push_back(grid.bp[i]);
    fwd_pts.push_back(br.b);
    size_t M = fwd_pts.size();
    fwd_img.resize(M);
    fwd_der.resize(M);
    for (size_t i = 0; i < M; ++i) {
      double d;
      fwd_img[i] = bs.forward(fwd_pts[i], br.steps, &d);
      fwd_der[i] = d;
    }
    fwd_img[0] = br.img_lo;
    fwd_img[M - 1] = br.img_hi;
    for (size_t i = 1; i < M; ++i)
      if (fwd_img[i] < fwd_img[i - 1]) fwd_img[i] = fwd_img[i - 1];

    for (size_t i = 0; i + 1 < M; ++i) {
      double p0 = fwd_pts[i], p1 = fwd_pts[i + 1];
      double q0 = fwd_img[i], q1 = fwd_img[i + 1];
      if (p1 <= p0) continue;
      size_t r = grid.locate(0.5 * (p0 + p1));
      double piece_mass = srcw.mass(p0, p1);
      if (piece_mass <= 0) continue;
      if (q1 <= q0) {
        add_entry(r, grid.locate(q0), piece_mass);
        continue;
      }
      double pw = p1 - p0, qw = q1 - q0;
      double s0 = fwd_der[i] * pw / qw;
      double s1 = fwd_der[i + 1] * pw / qw;
      size_t j0 = grid.locate(q0), j1 = grid.locate(q1);
      double prev_cdf = srcw.cdf(p0);
      double end_cdf = srcw.cdf(p1);
      for (size_t j = j0; j <= j1; ++j) {
        double zb = grid.right(j);
        double u, ucdf;
        if (j == j1 || zb >= q1) {
          u = p1;
          ucdf = end_cdf;
        } else {
          double t = inv_hermite((zb - q0) / qw, s0, s1);
          u = p0 + t * pw;
          ucdf = srcw.cdf(u);
        }
        double dm = ucdf - prev_cdf;
        if (dm > 0) add_entry(r, j, dm);
        prev_cdf = ucdf;
        if (u >= p1) break;
      }
    }
  }

  UlamOperator op;
  op.kind = kind;
  op.grid = grid;
  op.rowptr.push_back(0);

  // coverage per row, remainder handling, exact normalization
  double total_remainder = 0;
  for (size_t r = 0; r < N; ++r) {
    // merge duplicate columns
    auto& rr = rows[r];
    std::sort(rr.begin(), rr.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    double covered = 0;
    for (auto& e : rr) covered += e.second;
    double rowmass = srcw.mass(grid.left(r), grid.right(r));
    double missing = rowmass - covered;
    if (rowmass <= 0) {
      // empty source cell: keep an identity row to preserve stochasticity
      op.col.push_back((uint32_t)r);
      op.val.push_back(1.0);
      op.rowptr.push_back(op.col.size());
      continue;
    }
    if (missing > 1e-15 * rowmass) {
      total_remainder += missing;
      ++op.flagged_rows;
      if (covered <= 0 && bs.uncovered_profile) {
        int pid = bs.uncovered_profile(grid.mid(r));
        const auto& cm = prof_cols[pid];
        for (size_t j = 0; j < N; ++j)
          if (cm[j] > 0) rr.push_back({(uint32_t)j, missing * cm[j]});
        std::sort(rr.begin(), rr.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        covered = rowmass;
      } else {
        // spread proportionally to the existing row
        double f = rowmass / covered;
        for (auto& e : rr) e.second *= f;
        covered = rowmass;
      }
    }
    // compress + normalize row to sum exactly 1
    double sum = 0;
    for (auto& e : rr) sum += e.second;
    uint32_t last = UINT32_MAX;
    size_t begin = op.col.size();
    for (auto& e : rr) {
      if (e.first == last) {
        op.val.back() += e.second / sum;
      } else {
        op.col.push_back(e.first);
        op.val.push_back(e.second / sum);
        last = e.first;
      }
    }
    (void)begin;
    op.rowptr.push_back(op.col.size());
    rr.clear();
    rr.shrink_to_fit();
  }
  double total_src = srcw.mass(grid.lo, grid.hi);
  op.remainder_total = total_src > 0 ? total_remainder / total_src : 0.0;
  return op;
}

void UlamOperator::apply_transpose(const std::vector<double>& in,
                                   std::vector<double>& out) const {
  out.assign(n(), 0.0);
  for (size_t r = 0; r < n(); ++r) {
    double m = in[r];
    if (m == 0.0) continue;
    for (size_t k = rowptr[r]; k < rowptr[r + 1]; ++k) out[col[k]] += m * val[k];
  }
}

void UlamOperator::apply(const std::vector<double>& in, std::vector<double>& out) const {
  out.assign(n(), 0.0);
  for (size_t r = 0; r < n(); ++r) {
    double acc = 0;
    for (size_t k = rowptr[r]; k < rowptr[r + 1]; ++k) acc += val[k] * in[col[k]];
    out[r] = acc;
  }
}

double UlamOperator::max_row_sum_dev() const {
  double dev = 0;
  for (size_t r = 0; r < n(); ++r) {
    double s = 0;
    for (size_t k = rowptr[r]; k < rowptr[r + 1]; ++k) s += val[k];
    dev = std::max(dev, std::fabs(s - 1.0));
  }
  return dev;
}

DensityVector invariant_density(const UlamOperator& op, int max_iter, double tol) {
  size_t N = op.n();
  std::vector<double> m(N), next;
  double tot0 = 0;
  for (size_t i = 0; i < N; ++i) {
    m[i] = op.grid.width(i);
    tot0 += m[i];
  }
  for (auto& v : m) v /= tot0;
  double resid = 1;
  for (int it = 0; it < max_iter; ++it) {
    op.apply_transpose(m, next);
    resid = 0;
    for (size_t i = 0; i < N; ++i) resid += std::fabs(next[i] - m[i]);
    m.swap(next);
    if (resid < tol) break;
  }
  if (!(resid < 1e-8))
    throw std::runtime_error("invariant_density: power iteration did not converge");
  DensityVector d;
  d.grid = op.grid;
  d.weights.resize(N);
  for (size_t i = 0; i < N; ++i) {
    double w = op.grid.width(i);
    d.weights[i] = w > 0 ? std::max(0.0, m[i]) / w : 0.0;
  }
  d.normalize(1.0);
  return d;
}

SpectralReport spectral_report(const UlamOperator& op, std::uint64_t seed) {
  size_t N = op.n();
  SpectralReport rep;
  // leading eigenvalue via Rayleigh quotient at the fixed mass vector
  DensityVector d = invariant_density(op);
  std::vector<double> m(N), pm;
  for (size_t i = 0; i < N; ++i) m[i] = d.weights[i] * op.grid.width(i);
  op.apply_transpose(m, pm);
  double num = 0, den = 0;
  for (size_t i = 0; i < N; ++i) {
    num += pm[i] * m[i];
    den += m[i] * m[i];
  }
  rep.leading = num / den;

  // second eigenvalue modulus on the zero-sum subspace
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(N), nv;
  for (auto& x : v) x = u(rng);
  auto project = [&](std::vector<double>& w) {
    double s = 0;
    for (double x : w) s += x;
    s /= (double)N;
    for (double& x : w) x -= s;
  };
  auto norm1 = [&](const std::vector<double>& w) {
    double s = 0;
    for (double x : w) s += std::fabs(x);
    return s;
  };
  project(v);
  double nrm = norm1(v);
  for (auto& x : v) x /= nrm;
  int warm = 60, window = 40;
  double log_ratio = 0;
  int counted = 0;
  for (int it = 0; it < warm + window; ++it) {
    op.apply_transpose(v, nv);
    project(nv);
    double nn = norm1(nv);
    if (nn <= 1e-300) {
      rep.second_modulus = 0;
      break;
    }
    if (it >= warm) {
      log_ratio += std::log(nn);
      ++counted;
    }
    for (size_t i = 0; i < N; ++i) v[i] = nv[i] / nn;
    rep.iterations = it + 1;
  }
  if (counted > 0) rep.second_modulus = std::exp(log_ratio / counted);
  rep.gap = 1.0 - rep.second_modulus;
  return rep;
}

DualityReport duality_residual(const UlamOperator& op, const BranchSet& bs,
                               const std::function<double(double)>& v,
                               const std::function<double(double)>& w) {
  const Grid& g = op.grid;
  size_t N = g.cells();
  // cell averages by Simpson
  auto avg = [&](const std::function<double(double)>& f, size_t i) {
    double a = g.left(i), b = g.right(i);
    return (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) / 6.0;
  };
  std::vector<double> masses(N), out;
  for (size_t i = 0; i < N; ++i) masses[i] = avg(v, i) * g.width(i);
  op.apply_transpose(masses, out);
  DualityReport rep;
  for (size_t j = 0; j < N; ++j) rep.lhs += out[j] * avg(w, j);

  // independent quadrature of int v * (w o T) over each branch; branches that
  // are too thin or too deep for stable forward orbits go into the bracket
  double covered = 0;
  const double min_width = 1e-10;
  const long long steps_cap = 512;
  for (const auto& br : bs.branches) {
    if (br.b - br.a < min_width || br.steps > steps_cap) continue;
    covered += br.b - br.a;
    size_t ilo = std::upper_bound(g.bp.begin(), g.bp.end(), br.a) - g.bp.begin();
    size_t ihi = std::lower_bound(g.bp.begin(), g.bp.end(), br.b) - g.bp.begin();
    std::vector<double> pts{br.a};
    for (size_t i = ilo; i < ihi; ++i) pts.push_back(g.bp[i]);
    pts.push_back(br.b);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      double a = pts[i], b = pts[i + 1];
      if (b <= a) continue;
      double acc = 0;
      double h = (b - a) / 2;
      for (int s = 0; s <= 2; ++s) {
        double x = a + h * s;
        if (s == 0) x = a + 1e-13 * (b - a);
        if (s == 2) x = b - 1e-13 * (b - a);
        double fx = v(x) * w(bs.forward(x, br.steps, nullptr));
        acc += (s == 1 ? 4.0 : 1.0) * fx;
      }
      rep.rhs += acc * h / 3.0;
    }
  }
  double vmax = 0, wmax = 0;
  for (size_t i = 0; i < N; ++i) {
    vmax = std::max(vmax, std::fabs(v(g.mid(i))));
    wmax = std::max(wmax, std::fabs(w(g.mid(i))));
  }
  rep.bracket = ((g.hi - g.lo) - covered) * vmax * wmax;
  rep.residual = std::fabs(rep.lhs - rep.rhs);
  return rep;
}

PushupResult pushup_measure(const MapParams& p, const ReturnSchedule& sched,
                            const CumulativeMeasure& mu0, long long j_max,
                            const Grid& xgrid) {
  PushupResult res;
  res.xgrid = xgrid;
  res.level_total.assign((size_t)j_max + 1, 0.0);
  res.accumulated.assign(xgrid.cells(), 0.0);
  // three-node quadrature within each schedule cell
  const double nodes[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
  const double wts[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  for (const auto& c : sched.cells) {
    double cmass = mu0.mass(c.left, c.right);
    if (cmass <= 0) continue;
    long long top = std::min<long long>(c.phi - 1, j_max);
    for (long long j = 0; j <= top; ++j) res.level_total[(size_t)j] += cmass;
    double wdt = c.right - c.left;
    bool stable = wdt > 1e-9;
    for (int q = 0; q < (stable ? 3 : 1); ++q) {
      double x0 = stable ? c.left + nodes[q] * wdt : 0.5 * (c.left + c.right);
      double wq = stable ? wts[q] : 1.0;
      double pos = x0;
      for (long long j = 0; j <= top; ++j) {
        res.accumulated[xgrid.locate(pos)] += cmass * wq;
        pos = map_eval(p, pos);
      }
    }
  }
  // uncovered mass: contributes to every level (phi beyond the cap)
  double unc = mu0.total();
  for (const auto& c : sched.cells) unc -= mu0.mass(c.left, c.right);
  res.uncovered_mass = std::max(0.0, unc);
  res.partial_sum.resize(res.level_total.size());
  double run = 0;
  for (size_t j = 0; j < res.level_total.size(); ++j) {
    run += res.level_total[j];
    res.partial_sum[j] = run;
  }
  return res;
}

} // namespace afn
