#pragma once

#include <algorithm>
#include <cmath>

namespace blidkit {

/// Sampled supremum of a derivative together with the grid it came from.
struct SupEstimate {
  double value = 0.0;
  double argmax = 0.0;
  int grid_points = 0;
  double resolution = 0.0;  ///< grid spacing before polishing
};

/**
 * Smooth even bump on the real line built from the mollifier quotient
 *
 *   h(t) = g(r2 - |t|) / (g(r2 - |t|) + g(|t| - r1)),   g(s) = exp(-1/s) for s > 0, else 0.
 *
 * h is exactly 1 on [-r1, r1], exactly 0 outside (-r2, r2) and C-infinity everywhere.
 */
class BumpFunction {
 public:
  BumpFunction(double plateau_radius, double support_radius);

  double operator()(double t) const;

  /// Analytic derivative of order 1 or 2. Zero on the plateau and outside the support.
  double deriv(double t, int order) const;

  double plateau_radius() const { return r1_; }
  double support_radius() const { return r2_; }

  /// Cached sup|h'| (dense grid plus golden-section polish, computed at construction).
  double derivative_sup_order1() const { return sup1_; }

 private:
  double r1_;
  double r2_;
  double sup1_ = 0.0;
};

BumpFunction make_bump(double plateau_radius, double support_radius);

double bump_deriv(const BumpFunction& h, double t, int order);

/// Lower bound on sup over [r1, r2] of |h^(order)| from a grid of `grid_points`
/// samples refined by golden-section search around the best sample.
SupEstimate sup_abs_deriv(const BumpFunction& h, int order, int grid_points = 10000);

/// Maximize a continuous function on [lo, hi]: dense sampling then golden-section polish
/// on the bracket around the best sample.
template <class F>
SupEstimate grid_polish_max(F&& fn, double lo, double hi, int grid_points) {
  SupEstimate out;
  out.grid_points = grid_points;
  out.resolution = (hi - lo) / (grid_points - 1);
  int best = 0;
  double best_val = fn(lo);
  for (int i = 1; i < grid_points; ++i) {
    const double v = fn(lo + i * out.resolution);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * out.resolution;
  double b = lo + std::min(grid_points - 1, best + 1) * out.resolution;
  double best_x = lo + best * out.resolution;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  for (double x : {c, d, 0.5 * (a + b)}) {
    const double v = fn(x);
    if (v > best_val) {
      best_val = v;
      best_x = x;
    }
  }
  out.value = best_val;
  out.argmax = best_x;
  return out;
}

}  // namespace blidkit
