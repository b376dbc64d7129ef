#include "afnlab/lattice.hpp"
#include "afnlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace afn {

long long OrbitLattice::ladder_index(double z) const {
  // x is strictly decreasing with x[0] = e0.
  if (z >= e0) return 0;
  if (z < x.back())
    throw std::runtime_error("lattice-depth-exceeded: point below stored x-ladder");
  // find j with x[j] <= z < x[j-1]
  auto it = std::lower_bound(x.begin(), x.end(), z, std::greater<double>());
  long long j = it - x.begin();
  return j;
}

namespace {

// One pullback stage: solve left_value(u) = target with u in [lo, hi].
inline double pull_left(const MapParams& p, double target, double lo, double hi,
                        double guess, double* dval) {
  auto g = [&](double u) { return left_value(p, u); };
  auto dg = [&](double u) { return map_deriv(p, u); };
  double u = solve_increasing<double>(g, dg, target, lo, hi, guess,
                                      3e-17 + 1e-16 * target);
  if (dval) *dval = map_deriv(p, u);
  return u;
}

} // namespace

double OrbitLattice::return_branch_inv(long long m, double z, double* deriv) const {
  if (m < y_first) throw std::domain_error("return_branch_inv: branch does not exist");
  if (m > depth_n()) throw std::runtime_error("lattice-depth-exceeded: m beyond x-ladder");
  const MapParams& p = params;
  double logd = 0.0;
  double u = z;          // stage s value lives in [x_s, x_{s-1}]
  double frac = 0.5;
  if (m >= 2) {
    double lo = x[1], hi = x[0];
    frac = (z - e0) / (1.0 - e0);
    for (long long s = 1; s <= m - 1; ++s) {
      lo = x[s];
      hi = x[s - 1];
      double guess = lo + frac * (hi - lo);
      double d;
      u = pull_left(p, u, lo, hi, guess, &d);
      logd += std::log(d);
      frac = (u - lo) / (hi - lo);
    }
  }
  // final stage through the wrapped branch
  auto g = [&](double v) { return right_value(p, v); };
  auto dg = [&](double v) { return map_deriv(p, v); };
  double ylo = (m <= (long long)y.size() - 1 && m >= y_first) ? y[m] : e0;
  double yhi = (m - 1 >= y_first && m - 1 <= (long long)y.size() - 1) ? y[m - 1] : 1.0;
  if (m == 1) yhi = 1.0;
  double yy = solve_increasing<double>(g, dg, u, ylo, yhi, 0.5 * (ylo + yhi), 3e-17);
  if (deriv) *deriv = std::exp(logd + std::log(map_deriv(p, yy)));
  return yy;
}

double OrbitLattice::k_chain_inv(int k, double z, double* deriv) const {
  if (k < 0 || k > depth_k()) throw std::domain_error("k_chain_inv: k out of range");
  double total = 1.0;
  double w = z;
  for (int j = k; j >= 1; --j) {
    double d = 1.0;
    w = return_branch_inv(sigma[j], w, deriv ? &d : nullptr);
    total *= d;
  }
  if (deriv) *deriv = total;
  return w;
}

namespace {

OrbitLattice build_impl(const MapParams& p, long long depth_n, int depth_k,
                        double lambda_cap, bool throw_on_unreachable) {
  if (depth_n < 1) throw std::invalid_argument("build_lattice: depth_n >= 1 required");
  OrbitLattice lat{p};
  lat.e0_ld = solve_e0_ld(p);
  lat.e0 = (double)lat.e0_ld;

  // x-ladder
  lat.x.resize((size_t)depth_n + 1);
  lat.x[0] = lat.e0;
  {
    auto g = [&](double u) { return left_value(p, u); };
    auto dg = [&](double u) { return map_deriv(p, u); };
    for (long long n = 1; n <= depth_n; ++n) {
      double prev = lat.x[n - 1];
      double guess = (n >= 2) ? lat.x[n - 1] * (lat.x[n - 1] / lat.x[n - 2]) : 0.7 * prev;
      lat.x[n] = solve_increasing<double>(g, dg, prev, 0.0, lat.x[n - 1], guess,
                                          3e-17 + 1e-16 * prev);
    }
  }

  // y-ladder: y[j] = r^{-1}(x[j-1]) wherever x[j-1] <= b
  lat.y.assign((size_t)depth_n + 1, std::numeric_limits<double>::quiet_NaN());
  lat.y[0] = 1.0;
  lat.y_first = -1;
  {
    auto g = [&](double v) { return right_value(p, v); };
    auto dg = [&](double v) { return map_deriv(p, v); };
    double lo = lat.e0;
    double hi = 1.0;
    for (long long j = 1; j <= depth_n; ++j) {
      double target = lat.x[j - 1];
      if (target > p.b) continue;
      if (lat.y_first < 0) lat.y_first = (int)j;
      lat.y[j] = solve_increasing<double>(g, dg, target, lo, hi, 0.5 * (lo + hi), 3e-17);
      hi = lat.y[j];  // y decreasing in j
    }
    if (lat.y_first < 0)
      throw std::runtime_error("build_lattice: x-ladder never enters the wrapped image");
  }

  // e-chain along the itinerary of 1^- together with sigma, tau1, lambda.
  lat.e.push_back(lat.e0);
  lat.e_ld.push_back(lat.e0_ld);
  lat.sigma.push_back(0);
  lat.tau1.push_back(0);
  lat.one_orbit.push_back(1.0L);
  lat.lambda.push_back(map_deriv(p, lat.e0));  // Df^{tau1[0]+1}(e0) = f'(e0)
  lat.fwd_residual.push_back(0.0);

  const long double e0l = lat.e0_ld;
  long double w = 1.0L;  // f^{tau1[k]}(1^-)
  const long double bl = (long double)p.b;
  const long double al = (long double)p.alpha;
  auto right_ld = [&](long double v) { return v * (1.0L + bl * pow_alpha_ld(v, al)) - 1.0L; };
  auto left_ld = [&](long double v) { return v * (1.0L + bl * pow_alpha_ld(v, al)); };

  for (int k = 1; k <= depth_k; ++k) {
    long double z = right_ld(w);
    if (z < 0) z = 0;
    int sig;
    if (z >= e0l) {
      sig = 1;
    } else {
      long long j = lat.ladder_index((double)z);
      if (j >= depth_n)
        throw std::runtime_error("build_lattice: x-ladder too shallow for sigma chain");
      sig = (int)(1 + j);
    }
    // advance the orbit of 1 across this return
    long double wn = z;
    for (int s = 1; s < sig; ++s) wn = left_ld(wn);
    if (wn > 1.0L) wn = 1.0L;

    long long t_next = lat.tau1.back() + sig;
    // e_{k} = G_{k-1}(y_{sigma_k})
    if (sig < lat.y_first || std::isnan(lat.y[sig]))
      throw std::runtime_error("build_lattice: sigma below first valid return branch");
    lat.sigma.push_back(sig);
    double ek = lat.k_chain_inv(k - 1, lat.y[sig]);
    lat.tau1.push_back(t_next);
    lat.e.push_back(ek);
    lat.e_ld.push_back((long double)ek);
    lat.one_orbit.push_back(wn);
    w = wn;

    // lambda_k and forward residual by a long-double forward orbit
    long double pos = (long double)ek;
    long double dprod = 1.0L;
    for (long long i = 0; i < t_next; ++i) {
      dprod *= map_deriv_ld(p, pos);
      pos = map_eval_ld(p, pos);
    }
    lat.fwd_residual.push_back((double)fabsl(pos - e0l));
    dprod *= map_deriv_ld(p, pos);
    lat.lambda.push_back((double)dprod);

    if (lat.lambda.back() > lambda_cap) {
      if (throw_on_unreachable && k < depth_k)
        throw std::runtime_error(
            "depth-unreachable: branch derivative exceeds lambda cap before depth_k");
      break;
    }
  }
  // align: lambda[k-1] corresponds to e[k]?  Keep lambda/fwd_residual indexed by k>=1
  return lat;
}

} // namespace

OrbitLattice build_lattice(const MapParams& p, long long depth_n, int depth_k,
                           double lambda_cap) {
  return build_impl(p, depth_n, depth_k, lambda_cap, true);
}

OrbitLattice build_lattice_auto(const MapParams& p, long long depth_n,
                                double lambda_cap) {
  return build_impl(p, depth_n, 1 << 20, lambda_cap, false);
}

long long first_return_time(const MapParams& p, const OrbitLattice& lat, double y) {
  if (y < lat.e0 - 1e-12 || y > 1.0 + 1e-12)
    throw std::domain_error("first_return_time: y outside Y");
  double z = right_value(p, y);
  if (z < 0) z = 0;
  if (z >= lat.e0) return 1;
  return 1 + lat.ladder_index(z);
}

LatticeResiduals lattice_residuals(const OrbitLattice& lat) {
  LatticeResiduals r;
  const MapParams& p = lat.params;
  for (long long n = 1; n <= lat.depth_n(); ++n) {
    double v = std::fabs(left_value(p, lat.x[n]) - lat.x[n - 1]);
    r.x_max = std::max(r.x_max, v);
  }
  for (long long j = std::max(1, lat.y_first); j <= lat.depth_n(); ++j) {
    if (std::isnan(lat.y[j])) continue;
    double v = std::fabs(right_value(p, lat.y[j]) - lat.x[j - 1]);
    r.y_max = std::max(r.y_max, v);
  }
  for (double v : lat.fwd_residual) r.e_max = std::max(r.e_max, v);
  return r;
}

} // namespace afn
