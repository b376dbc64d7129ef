#include "afnlab/renewal.hpp"

#include <cmath>
#include <stdexcept>

namespace afn {

ScalarRenewal scalar_renewal(const std::vector<double>& p, size_t n_max) {
  ScalarRenewal r;
  r.p = p;
  double ptot = 0;
  for (size_t j = 1; j < p.size(); ++j) {
    if (p[j] < 0) throw std::invalid_argument("scalar_renewal: p_n >= 0 required");
    ptot += p[j];
    r.mean += (double)j * p[j];
  }
  if (ptot > 1.0 + 1e-12)
    throw std::invalid_argument("scalar_renewal: sum p_n must be <= 1");
  r.u.assign(n_max + 1, 0.0);
  r.u[0] = 1.0;
  for (size_t n = 1; n <= n_max; ++n) {
    double acc = 0;
    size_t jmax = std::min(n, p.size() - 1);
    for (size_t j = 1; j <= jmax; ++j) acc += p[j] * r.u[n - j];
    r.u[n] = acc;
  }
  return r;
}

double coefficient_extract(
    const std::function<std::complex<double>(std::complex<double>)>& b,
    long long n, double tol, int max_doublings) {
  if (n < 0) throw std::invalid_argument("coefficient_extract: n >= 0");
  if (n == 0) return b(std::complex<double>(0.0, 0.0)).real();
  const double r = std::exp(-1.0 / (double)n);
  // b_n = r^{-n}/(2 pi) * int b(r e^{i t}) e^{-i n t} dt; trapezoid is
  // spectrally accurate, the node count controls coefficient aliasing.
  long long K = std::max<long long>(8 * n, 64);
  double prev = 0;
  bool have_prev = false;
  for (int d = 0; d <= max_doublings; ++d) {
    std::complex<double> acc(0.0, 0.0);
    for (long long k = 0; k < K; ++k) {
      double t = 2.0 * M_PI * (double)k / (double)K;
      std::complex<double> z = std::polar(r, t);
      acc += b(z) * std::polar(1.0, -t * (double)n);
    }
    double val = (acc.real() / (double)K) * std::exp(1.0);  // r^{-n} = e
    if (have_prev && std::fabs(val - prev) <= 0.5 * tol) return val;
    prev = val;
    have_prev = true;
    K *= 2;
  }
  throw std::runtime_error(
      "coefficient_extract: node doubling did not converge to tolerance");
}

} // namespace afn
