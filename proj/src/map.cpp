#include "afnlab/map.hpp"
#include "afnlab/roots.hpp"

#include <cmath>
#include <stdexcept>

namespace afn {

MapParams::MapParams(double alpha_, double b_) : alpha(alpha_), b(b_) {
  if (!(alpha > 0.0)) throw std::invalid_argument("MapParams: alpha must be > 0");
  if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("MapParams: b must be in (0,1]");
  beta = 1.0 / alpha;
  finite_measure = alpha < 1.0;
}

double pow_alpha(double x, double alpha) {
  if (x <= 0.0) return 0.0;
  if (alpha == 1.0) return x;
  if (alpha == 0.5) return std::sqrt(x);
  if (alpha == 1.5) return x * std::sqrt(x);
  if (alpha == 2.0) return x * x;
  return std::pow(x, alpha);
}

long double pow_alpha_ld(long double x, long double alpha) {
  if (x <= 0.0L) return 0.0L;
  if (alpha == 1.0L) return x;
  if (alpha == 0.5L) return sqrtl(x);
  if (alpha == 1.5L) return x * sqrtl(x);
  if (alpha == 2.0L) return x * x;
  return powl(x, alpha);
}

namespace {
constexpr double kDomainTol = 1e-12;

double clamp01(double x) {
  if (x < 0.0) {
    if (x < -kDomainTol) throw std::domain_error("map_eval: x outside [0,1]");
    return 0.0;
  }
  if (x > 1.0) {
    if (x > 1.0 + kDomainTol) throw std::domain_error("map_eval: x outside [0,1]");
    return 1.0;
  }
  return x;
}
} // namespace

double map_eval(const MapParams& p, double x) {
  x = clamp01(x);
  double u = x * (1.0 + p.b * pow_alpha(x, p.alpha));
  return u - std::floor(u);
}

long double map_eval_ld(const MapParams& p, long double x) {
  if (x < 0.0L) x = 0.0L;
  if (x > 1.0L) x = 1.0L;
  long double u = x * (1.0L + (long double)p.b * pow_alpha_ld(x, (long double)p.alpha));
  return u - floorl(u);
}

double map_deriv(const MapParams& p, double x) {
  x = clamp01(x);
  return 1.0 + p.b * (1.0 + p.alpha) * pow_alpha(x, p.alpha);
}

long double map_deriv_ld(const MapParams& p, long double x) {
  return 1.0L + (long double)p.b * (1.0L + (long double)p.alpha) *
                    pow_alpha_ld(x, (long double)p.alpha);
}

double left_value(const MapParams& p, double x) {
  return x * (1.0 + p.b * pow_alpha(x, p.alpha));
}

double right_value(const MapParams& p, double x) {
  return x * (1.0 + p.b * pow_alpha(x, p.alpha)) - 1.0;
}

double solve_e0(const MapParams& p) {
  auto g = [&](double x) { return x * (1.0 + p.b * pow_alpha(x, p.alpha)); };
  auto dg = [&](double x) { return map_deriv(p, x); };
  return solve_increasing<double>(g, dg, 1.0, 0.0, 1.0, 0.6, 1e-15);
}

long double solve_e0_ld(const MapParams& p) {
  long double a = (long double)p.alpha, b = (long double)p.b;
  auto g = [&](long double x) { return x * (1.0L + b * pow_alpha_ld(x, a)); };
  auto dg = [&](long double x) { return map_deriv_ld(p, x); };
  return solve_increasing<long double>(g, dg, 1.0L, 0.0L, 1.0L, 0.6L, 1e-19L);
}

double invert_branch(const MapParams& p, Branch br, double z) {
  if (br == Branch::Left) {
    if (z < -kDomainTol || z > 1.0 + kDomainTol)
      throw std::domain_error("invert_branch: z outside Left image [0,1]");
    if (z <= 0.0) return 0.0;
    if (z > 1.0) z = 1.0;
    double e0 = solve_e0(p);
    auto g = [&](double x) { return left_value(p, x); };
    auto dg = [&](double x) { return map_deriv(p, x); };
    return solve_increasing<double>(g, dg, z, 0.0, e0, z / 2.0, 1e-16 + 1e-16 * z);
  }
  if (z < -kDomainTol || z > p.b + kDomainTol)
    throw std::domain_error("invert_branch: z outside Right image [0,b]");
  if (z < 0.0) z = 0.0;
  if (z > p.b) z = p.b;
  double e0 = solve_e0(p);
  auto g = [&](double x) { return right_value(p, x); };
  auto dg = [&](double x) { return map_deriv(p, x); };
  return solve_increasing<double>(g, dg, z, e0, 1.0, (e0 + 1.0) / 2.0, 1e-16);
}

long double invert_branch_ld(const MapParams& p, Branch br, long double z) {
  long double a = (long double)p.alpha, b = (long double)p.b;
  long double e0 = solve_e0_ld(p);
  if (br == Branch::Left) {
    if (z <= 0.0L) return 0.0L;
    if (z > 1.0L) z = 1.0L;
    auto g = [&](long double x) { return x * (1.0L + b * pow_alpha_ld(x, a)); };
    auto dg = [&](long double x) { return map_deriv_ld(p, x); };
    return solve_increasing<long double>(g, dg, z, 0.0L, e0, z / 2.0L,
                                         1e-20L + 1e-19L * z);
  }
  if (z < 0.0L) z = 0.0L;
  if (z > b) z = b;
  auto g = [&](long double x) { return x * (1.0L + b * pow_alpha_ld(x, a)) - 1.0L; };
  auto dg = [&](long double x) { return map_deriv_ld(p, x); };
  return solve_increasing<long double>(g, dg, z, e0, 1.0L, (e0 + 1.0L) / 2.0L, 1e-19L);
}

double iterate(const MapParams& p, double x, long long n) {
  if (n < 0) throw std::invalid_argument("iterate: n must be >= 0");
  for (long long i = 0; i < n; ++i) x = map_eval(p, x);
  return x;
}

double iterate_recorded(const MapParams& p, double x, long long n,
                        double e0, std::vector<uint8_t>& visits) {
  if (n < 0) throw std::invalid_argument("iterate: n must be >= 0");
  visits.clear();
  visits.reserve((size_t)n);
  for (long long i = 0; i < n; ++i) {
    x = map_eval(p, x);
    visits.push_back(x >= e0 ? 1 : 0);
  }
  return x;
}

} // namespace afn
