#pragma once

#include <cstddef>
#include <vector>

namespace afn {

struct ReturnSchedule;

// Interval partition of [lo, hi] by strictly increasing breakpoints.
struct Grid {
  double lo = 0, hi = 1;
  std::vector<double> bp;  // size cells()+1, bp.front()==lo, bp.back()==hi

  size_t cells() const { return bp.size() - 1; }
  double left(size_t i) const { return bp[i]; }
  double right(size_t i) const { return bp[i + 1]; }
  double width(size_t i) const { return bp[i + 1] - bp[i]; }
  double mid(size_t i) const { return 0.5 * (bp[i] + bp[i + 1]); }
  size_t locate(double x) const;  // clamped

  static Grid uniform(double lo, double hi, size_t n);
  // Power grading toward `lo`: breakpoints lo + (hi-lo)*(i/n)^gamma.
  static Grid graded(double lo, double hi, size_t n, double gamma);
  // Breakpoints taken from schedule cells wider than w_min, geometric fill
  // toward each accumulation point, plus a uniform bulk of about bulk_n.
  static Grid schedule_aligned(const ReturnSchedule& s, double w_min,
                               size_t bulk_n, double fill_ratio = 1.04);
};

// Nonnegative cell weights (density values); total mass = sum w_i * width_i.
struct DensityVector {
  Grid grid;
  std::vector<double> weights;
  double normalization = 1.0;

  double mass() const;
  void normalize(double total = 1.0);
};

// Piecewise-linear CDF of either a DensityVector or Lebesgue measure,
// supporting fast mass(a, b) queries.
class CumulativeMeasure {
public:
  CumulativeMeasure() = default;
  explicit CumulativeMeasure(const DensityVector& d);
  static CumulativeMeasure lebesgue(double lo, double hi, double total = -1.0);

  double cdf(double x) const;
  double mass(double a, double b) const;
  double total() const { return total_; }
  bool is_lebesgue() const { return lebesgue_; }

private:
  bool lebesgue_ = true;
  double lo_ = 0, hi_ = 1, scale_ = 1, total_ = 1;
  Grid grid_;
  std::vector<double> prefix_;  // prefix_[i] = mass of [lo, bp[i]]
};

} // namespace afn
