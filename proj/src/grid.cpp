#include "afnlab/grid.hpp"
#include "afnlab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace afn {

size_t Grid::locate(double x) const {
  if (x <= lo) return 0;
  if (x >= hi) return cells() - 1;
  size_t i = std::upper_bound(bp.begin(), bp.end(), x) - bp.begin();
  return (i == 0) ? 0 : std::min(i - 1, cells() - 1);
}

Grid Grid::uniform(double lo, double hi, size_t n) {
  if (n < 1 || !(hi > lo)) throw std::invalid_argument("Grid::uniform: bad arguments");
  Grid g;
  g.lo = lo;
  g.hi = hi;
  g.bp.resize(n + 1);
  for (size_t i = 0; i <= n; ++i) g.bp[i] = lo + (hi - lo) * (double(i) / double(n));
  g.bp.front() = lo;
  g.bp.back() = hi;
  return g;
}

Grid Grid::graded(double lo, double hi, size_t n, double gamma) {
  if (n < 1 || !(hi > lo) || gamma < 1.0)
    throw std::invalid_argument("Grid::graded: bad arguments");
  Grid g;
  g.lo = lo;
  g.hi = hi;
  g.bp.resize(n + 1);
  for (size_t i = 0; i <= n; ++i)
    g.bp[i] = lo + (hi - lo) * std::pow(double(i) / double(n), gamma);
  g.bp.front() = lo;
  g.bp.back() = hi;
  return g;
}

Grid Grid::schedule_aligned(const ReturnSchedule& s, double w_min, size_t bulk_n,
                            double fill_ratio) {
  std::vector<double> pts;
  pts.push_back(s.e0);
  pts.push_back(1.0);
  for (const auto& c : s.cells) {
    if (c.right - c.left >= w_min) {
      pts.push_back(c.left);
      pts.push_back(c.right);
    }
  }
  // geometric fill of each level's left gap (accumulation zone at e_k)
  for (const auto& lv : s.levels) {
    double gap_lo = lv.e_k;
    double gap_hi = lv.bnd.empty() ? lv.e_k1 : lv.bnd[0];
    double w = gap_hi - gap_lo;
    if (w <= w_min) continue;
    double d = w;
    while (d > w_min) {
      d /= fill_ratio;
      pts.push_back(gap_lo + d);
    }
  }
  // uniform bulk
  for (size_t i = 0; i <= bulk_n; ++i)
    pts.push_back(s.e0 + (1.0 - s.e0) * (double(i) / double(bulk_n)));
  std::sort(pts.begin(), pts.end());
  Grid g;
  g.lo = s.e0;
  g.hi = 1.0;
  double min_sep = 0.25 * w_min;
  for (double v : pts) {
    if (v < s.e0 || v > 1.0) continue;
    if (g.bp.empty() || v - g.bp.back() >= min_sep) g.bp.push_back(v);
  }
  if (g.bp.back() != 1.0) {
    if (1.0 - g.bp.back() < min_sep && g.bp.size() > 1) g.bp.pop_back();
    g.bp.push_back(1.0);
  }
  g.bp.front() = s.e0;
  if (g.bp.size() < 3) throw std::runtime_error("schedule_aligned: degenerate grid");
  return g;
}

double DensityVector::mass() const {
  double m = 0;
  for (size_t i = 0; i < weights.size(); ++i) m += weights[i] * grid.width(i);
  return m;
}

void DensityVector::normalize(double total) {
  double m = mass();
  if (m <= 0) throw std::runtime_error("DensityVector::normalize: zero mass");
  double f = total / m;
  for (double& w : weights) w *= f;
  normalization = total;
}

CumulativeMeasure::CumulativeMeasure(const DensityVector& d) {
  lebesgue_ = false;
  grid_ = d.grid;
  prefix_.resize(grid_.bp.size());
  prefix_[0] = 0;
  for (size_t i = 0; i < grid_.cells(); ++i)
    prefix_[i + 1] = prefix_[i] + d.weights[i] * grid_.width(i);
  total_ = prefix_.back();
  lo_ = grid_.lo;
  hi_ = grid_.hi;
}

CumulativeMeasure CumulativeMeasure::lebesgue(double lo, double hi, double total) {
  CumulativeMeasure c;
  c.lebesgue_ = true;
  c.lo_ = lo;
  c.hi_ = hi;
  c.total_ = (total > 0) ? total : (hi - lo);
  c.scale_ = c.total_ / (hi - lo);
  return c;
}

double CumulativeMeasure::cdf(double x) const {
  if (x <= lo_) return 0;
  if (x >= hi_) return total_;
  if (lebesgue_) return (x - lo_) * scale_;
  size_t i = grid_.locate(x);
  double w = grid_.width(i);
  double frac = w > 0 ? (x - grid_.left(i)) / w : 0.0;
  return prefix_[i] + frac * (prefix_[i + 1] - prefix_[i]);
}

double CumulativeMeasure::mass(double a, double b) const {
  if (b <= a) return 0;
  return cdf(b) - cdf(a);
}

} // namespace afn
