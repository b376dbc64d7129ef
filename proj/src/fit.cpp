#include "afnlab/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace afn {

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (det == 0) throw std::runtime_error("linear_fit: degenerate abscissae");
  LinFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / n);
  f.points = n;
  return f;
}

LinFit loglog_fit(const std::vector<double>& v, size_t n_lo, size_t n_hi) {
  std::vector<double> xs, ys;
  n_hi = std::min(n_hi, v.size() - 1);
  for (size_t n = n_lo; n <= n_hi; ++n) {
    if (v[n] > 0) {
      xs.push_back(std::log((double)n));
      ys.push_back(std::log(v[n]));
    }
  }
  return linear_fit(xs, ys);
}

LimitFit limit_fit(const std::vector<double>& v, double beta,
                   const std::vector<double>& g, size_t n_lo, size_t n_hi) {
  n_hi = std::min(n_hi, v.size() - 1);
  double s1 = 0, sg = 0, sgg = 0, sy = 0, sgy = 0;
  size_t cnt = 0;
  for (size_t n = n_lo; n <= n_hi; ++n) {
    double y = v[n] * std::pow((double)n, beta);
    double gn = g[n];
    s1 += 1;
    sg += gn;
    sgg += gn * gn;
    sy += y;
    sgy += gn * y;
    ++cnt;
  }
  if (cnt < 2) throw std::invalid_argument("limit_fit: window too small");
  double det = s1 * sgg - sg * sg;
  if (det == 0) throw std::runtime_error("limit_fit: degenerate regressor");
  LimitFit f;
  f.a = (sy * sgg - sg * sgy) / det;
  f.b = (s1 * sgy - sg * sy) / det;
  return f;
}

} // namespace afn
