#pragma once

#include <cstddef>
#include <vector>

namespace afn {

struct LinFit {
  double slope = 0, intercept = 0;
  double residual_rms = 0;
  size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x.
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log(v_n) against log(n) over n in [n_lo, n_hi]; nonpositive values
// are skipped.  Returns slope/intercept in log-log coordinates.
LinFit loglog_fit(const std::vector<double>& v, size_t n_lo, size_t n_hi);

// Two-parameter model v_n * n^beta = a + b * g(n); returns (a, b).
// Used to extrapolate the limiting constant of a power-law tail.
struct LimitFit {
  double a = 0, b = 0;
};
LimitFit limit_fit(const std::vector<double>& v, double beta,
                   const std::vector<double>& g, size_t n_lo, size_t n_hi);

} // namespace afn
