#pragma once

#include "afnlab/map.hpp"

#include <vector>

namespace afn {

// The backbone of the inducing scheme on Y = [e0, 1]:
//   x-ladder   x[0] = e0, f(x[n]) = x[n-1], decreasing to 0;
//   y-ladder   y[j] = the point of Y with f(y[j]) = x[j-1]  (first return
//              time j, f^j(y[j]) = e0), defined for j >= y_first;
//   e-chain    e[k] = right-most point whose k-th return lands on e0;
//   sigma[k]   return-branch index of the orbit of 1 at its (k-1)-th return;
//   tau1[k]    = sigma[1] + ... + sigma[k], the k-th return time of 1;
//   lambda[k]  = Df^{tau1[k]+1}(e[k]).
//
// All chain points are produced by inverse-branch pullbacks (contracting,
// numerically stable); forward orbits are used only to verify.
struct OrbitLattice {
  MapParams params;
  double e0 = 0;
  long double e0_ld = 0;

  std::vector<double> x;           // size depth_n + 1
  std::vector<double> y;           // y[0] = 1 sentinel; valid from y_first
  int y_first = 1;

  std::vector<double> e;           // e[0] = e0
  std::vector<long double> e_ld;
  std::vector<int> sigma;          // sigma[0] = 0 unused
  std::vector<long long> tau1;     // tau1[0] = 0
  std::vector<double> lambda;
  std::vector<double> fwd_residual;    // |f^{tau1[k]}(e[k]) - e0|
  std::vector<long double> one_orbit;  // w[k] = f^{tau1[k]}(1^-)

  int depth_k() const { return (int)e.size() - 1; }
  long long depth_n() const { return (long long)x.size() - 1; }

  // first j with x[j] <= z < x[j-1]; z must be in (x[depth_n], e0).
  long long ladder_index(double z) const;

  // Inverse of the m-th first-return branch, Y -> (y_m, y_{m-1}].
  // If deriv is non-null it receives Df^m at the preimage.
  double return_branch_inv(long long m, double z, double* deriv = nullptr) const;

  // Inverse of f^{tau1[k]} restricted to [e_k, 1]:  [e0, w_k] -> [e_k, 1].
  double k_chain_inv(int k, double z, double* deriv = nullptr) const;
};

// Builds the ladders to the requested depths.  Throws std::runtime_error
// ("depth-unreachable") if the e-chain cannot reach depth_k before the
// branch derivative exceeds lambda_cap (cells narrower than representable).
OrbitLattice build_lattice(const MapParams& p, long long depth_n, int depth_k,
                           double lambda_cap = 4.0e15);

// Extends the e-chain as far as lambda_cap allows instead of throwing.
OrbitLattice build_lattice_auto(const MapParams& p, long long depth_n,
                                double lambda_cap = 1.0e10);

// tau(y) = least n >= 1 with f^n(y) in Y, located against the x-ladder.
// Throws std::runtime_error("lattice-depth-exceeded") if f(y) falls below
// the stored ladder.
long long first_return_time(const MapParams& p, const OrbitLattice& lat, double y);

// Max over stored n of |f(x_n) - x_{n-1}| and over stored j of |f(y_j) - x_{j-1}|.
struct LatticeResiduals { double x_max = 0, y_max = 0, e_max = 0; };
LatticeResiduals lattice_residuals(const OrbitLattice& lat);

} // namespace afn
