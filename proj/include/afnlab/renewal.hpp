#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace afn {

// Scalar renewal sequence u_n driven by the return-time law p_n:
//   u_0 = 1,  u_n = sum_{j=1}^{n} p_j u_{n-j}.
struct ScalarRenewal {
  std::vector<double> p;  // p[0] unused, p[n] = P(return time = n)
  std::vector<double> u;
  double mean = 0;        // sum n p_n (may exceed available support)
};

ScalarRenewal scalar_renewal(const std::vector<double>& p, size_t n_max);

// n-th power series coefficient of b(z) by contour quadrature on the
// circle |z| = e^{-1/n}, with node doubling until two successive levels
// agree to `tol`.  Throws on non-convergence.
double coefficient_extract(const std::function<std::complex<double>(std::complex<double>)>& b,
                           long long n, double tol = 1e-10, int max_doublings = 8);

} // namespace afn
