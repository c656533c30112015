#include "blidkit/bump.hpp"

#include "blidkit/errors.hpp"

#include <cmath>
#include <string>

namespace blidkit {
namespace {

// g(s) = exp(-1/s) and its first two derivatives, all zero for s <= 0.
double g0(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double g1(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }
double g2(double s) {
  if (s <= 0.0) return 0.0;
  const double inv = 1.0 / s;
  return std::exp(-inv) * (inv * inv * inv * inv - 2.0 * inv * inv * inv);
}

}  // namespace

BumpFunction::BumpFunction(double plateau_radius, double support_radius)
    : r1_(plateau_radius), r2_(support_radius) {
  if (!(r1_ > 0.0) || !(r2_ > r1_) || !std::isfinite(r2_)) {
    throw ConfigError("bump: need 0 < r1 < r2, got r1=" + std::to_string(r1_) +
                      " r2=" + std::to_string(r2_));
  }
  sup1_ = sup_abs_deriv(*this, 1).value;
}

double BumpFunction::operator()(double t) const {
  const double s = std::abs(t);
  if (s <= r1_) return 1.0;
  if (s >= r2_) return 0.0;
  const double a = g0(r2_ - s);
  const double b = g0(s - r1_);
  return a / (a + b);
}

double BumpFunction::deriv(double t, int order) const {
  if (order != 1 && order != 2) {
    throw UsageError("bump_deriv: order must be 1 or 2");
  }
  const double s = std::abs(t);
  if (s <= r1_ || s >= r2_) return 0.0;

  // h as a function of s: A / (A + B) with A = g(r2 - s), B = g(s - r1).
  const double a = g0(r2_ - s), b = g0(s - r1_);
  const double da = -g1(r2_ - s), db = g1(s - r1_);
  const double d = a + b;
  const double num = da * b - a * db;
  if (order == 1) {
    const double sign = t < 0.0 ? -1.0 : 1.0;
    return sign * num / (d * d);
  }
  const double dda = g2(r2_ - s), ddb = g2(s - r1_);
  const double dnum = dda * b - a * ddb;
  return dnum / (d * d) - 2.0 * num * (da + db) / (d * d * d);
}

BumpFunction make_bump(double plateau_radius, double support_radius) {
  return BumpFunction(plateau_radius, support_radius);
}

double bump_deriv(const BumpFunction& h, double t, int order) { return h.deriv(t, order); }

SupEstimate sup_abs_deriv(const BumpFunction& h, int order, int grid_points) {
  if (order != 1 && order != 2) throw UsageError("sup_abs_deriv: order must be 1 or 2");
  if (grid_points < 2) throw UsageError("sup_abs_deriv: need at least 2 grid points");
  return grid_polish_max([&](double t) { return std::abs(h.deriv(t, order)); },
                         h.plateau_radius(), h.support_radius(), grid_points);
}

}  // namespace blidkit
