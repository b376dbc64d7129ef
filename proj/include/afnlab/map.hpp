#pragma once

#include <cstdint>
#include <vector>

namespace afn {

// Parameters of the interval map family
//   f(x) = x * (1 + b * x^alpha)  mod 1       on [0,1],
// which has an indifferent fixed point at 0.  beta = 1/alpha controls the
// polynomial rates throughout; the absolutely continuous invariant measure
// is finite iff alpha < 1.
struct MapParams {
  double alpha;
  double b;
  double beta;          // = 1/alpha
  bool finite_measure;  // = (alpha < 1)

  MapParams(double alpha_, double b_);
};

// The two monotone branches of f.  Left fixes 0 on [0, e0]; Right is the
// wrapped branch on (e0, 1], where e0 is the unique point with f(e0) = 0.
enum class Branch { Left, Right };

// x^alpha with fast paths for the exponents used throughout.
double pow_alpha(double x, double alpha);
long double pow_alpha_ld(long double x, long double alpha);

// f(x); domain error if x is outside [0,1] by more than 1e-12.
double map_eval(const MapParams& p, double x);
long double map_eval_ld(const MapParams& p, long double x);

// f'(x) = 1 + b(1+alpha) x^alpha  (>= 1, equality only at x = 0).
double map_deriv(const MapParams& p, double x);
long double map_deriv_ld(const MapParams& p, long double x);

// Unwrapped branch values: left_value maps [0,e0] onto [0,1],
// right_value maps [e0,1] onto [0,b].
double left_value(const MapParams& p, double x);
double right_value(const MapParams& p, double x);

// The unique e0 in (0,1) with e0*(1 + b*e0^alpha) = 1.
double solve_e0(const MapParams& p);
long double solve_e0_ld(const MapParams& p);

// Inverse of one branch.  Left: z in [0,1] -> x in [0,e0].
// Right: z in [0,b] -> x in [e0,1].  Throws std::domain_error when z is
// outside the branch image by more than 1e-12.
double invert_branch(const MapParams& p, Branch br, double z);
long double invert_branch_ld(const MapParams& p, Branch br, long double z);

// n-fold composition of f.
double iterate(const MapParams& p, double x, long long n);

// As above, also recording per step whether the iterate lies in Y = [e0, 1].
double iterate_recorded(const MapParams& p, double x, long long n,
                        double e0, std::vector<uint8_t>& visits);

} // namespace afn
