#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace afn {

// Bracketed Newton for strictly increasing g on [lo, hi].
// Solves g(x) = target. Falls back to bisection whenever a Newton step
// leaves the current bracket, so convergence is unconditional.
template <class Real, class F, class DF>
Real solve_increasing(F g, DF dg, Real target, Real lo, Real hi, Real x0,
                      Real ftol, int max_iter = 128) {
  Real glo = g(lo) - target;
  Real ghi = g(hi) - target;
  if (glo > Real(0) || ghi < Real(0)) {
    if (glo > Real(0) && glo <= ftol) return lo;
    if (ghi < Real(0) && -ghi <= ftol) return hi;
    throw std::domain_error("solve_increasing: target outside bracket");
  }
  Real x = x0;
  if (!(x >= lo && x <= hi)) x = (lo + hi) / Real(2);
  for (int it = 0; it < max_iter; ++it) {
    Real fx = g(x) - target;
    if (std::abs(fx) <= ftol) return x;
    if (fx > Real(0)) hi = x; else lo = x;
    Real d = dg(x);
    Real step = fx / d;
    Real xn = x - step;
    if (!(xn > lo && xn < hi)) xn = (lo + hi) / Real(2);
    if (xn == x) return x;
    x = xn;
  }
  return x;
}

} // namespace afn
