#include "blidkit/blid.hpp"

#include "blidkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace blidkit {
namespace {

// sup over s >= 0 of |DH| for the radial map, where DH has eigenvalue h(s^2) on x-perp and
// h(s^2) + 2 s^2 h'(s^2) along x. Parametrized by tau = s^2.
double radial_c1(const BumpFunction& h) {
  const auto along = [&](double tau) { return std::abs(h(tau) + 2.0 * tau * h.deriv(tau, 1)); };
  const SupEstimate e = grid_polish_max(along, h.plateau_radius(), h.support_radius(), 20000);
  return std::max(1.0, e.value);
}

double upper_radius(const BlidMap& H) {
  const double r2 = H.bump().support_radius();
  const double scale = H.variant() == BlidVariant::radial
                           ? std::max(1.0, std::sqrt(static_cast<double>(H.space().dim)))
                           : 1.0;
  return 10.0 * r2 * scale;
}

}  // namespace

BlidMap::BlidMap(SpaceDesc space, BlidVariant variant, BumpFunction bump)
    : space_(space), variant_(variant), bump_(bump) {
  if (variant_ == BlidVariant::radial) {
    if (space_.kind != SpaceKind::finite_dim || space_.norm != NormKind::euclidean) {
      throw ConfigError("radial blid requires a finite_dim space with the euclidean norm, got " +
                        space_.describe());
    }
    identity_radius_ = std::sqrt(bump_.plateau_radius());
    c0_ = std::sqrt(bump_.support_radius());
    c1_ = radial_c1(bump_);
  } else {
    if (space_.norm != NormKind::sup) {
      throw ConfigError("pointwise blid requires the sup norm, got " + space_.describe());
    }
    identity_radius_ = bump_.plateau_radius();
    c0_ = bump_.support_radius();
    c1_ = bump_.support_radius() * bump_.derivative_sup_order1() + 1.0;
  }
}

void BlidMap::declare_bounds(std::optional<double> c0, std::optional<double> c1) {
  if (c0) c0_ = *c0;
  if (c1) c1_ = *c1;
}

Vector BlidMap::eval(const Vector& x) const {
  space_.check_point(x, "blid_eval");
  if (variant_ == BlidVariant::radial) {
    return bump_(x.squaredNorm()) * x;
  }
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = bump_(x(i)) * x(i);
  return out;
}

Vector BlidMap::jacobian_diagonal(const Vector& x) const {
  if (variant_ != BlidVariant::pointwise) {
    throw UsageError("jacobian_diagonal: only the pointwise blid has a diagonal derivative");
  }
  Vector d(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    d(i) = bump_.deriv(x(i), 1) * x(i) + bump_(x(i));
  }
  return d;
}

Vector BlidMap::dderiv(const Vector& x, const Vector& v) const {
  space_.check_point(x, "blid_dderiv");
  space_.check_point(v, "blid_dderiv");
  if (variant_ == BlidVariant::radial) {
    const double tau = x.squaredNorm();
    return bump_(tau) * v + (2.0 * bump_.deriv(tau, 1) * x.dot(v)) * x;
  }
  return jacobian_diagonal(x).cwiseProduct(v);
}

Matrix BlidMap::jacobian(const Vector& x) const {
  space_.check_point(x, "blid_jacobian");
  if (variant_ == BlidVariant::radial) {
    const double tau = x.squaredNorm();
    Matrix j = bump_(tau) * Matrix::Identity(x.size(), x.size());
    j += (2.0 * bump_.deriv(tau, 1)) * x * x.transpose();
    return j;
  }
  return jacobian_diagonal(x).asDiagonal();
}

double BlidMap::deriv_norm(const Vector& x) const {
  space_.check_point(x, "blid_deriv_norm");
  if (variant_ == BlidVariant::radial) {
    const double tau = x.squaredNorm();
    const double perp = std::abs(bump_(tau));
    const double along = std::abs(bump_(tau) + 2.0 * tau * bump_.deriv(tau, 1));
    return x.size() == 1 ? along : std::max(perp, along);
  }
  return jacobian_diagonal(x).cwiseAbs().maxCoeff();
}

BlidMap make_radial_blid(const SpaceDesc& space, const BumpFunction& h) {
  return BlidMap(space, BlidVariant::radial, h);
}

BlidMap make_pointwise_blid(const SpaceDesc& space, const BumpFunction& h) {
  return BlidMap(space, BlidVariant::pointwise, h);
}

Vector blid_eval(const BlidMap& H, const Vector& x) { return H.eval(x); }

Vector blid_dderiv(const BlidMap& H, const Vector& x, const Vector& v) { return H.dderiv(x, v); }

SampledSup estimate_c0(const BlidMap& H, int samples, std::uint64_t seed) {
  if (samples < 1000) throw UsageError("estimate_c0: need at least 1000 samples");
  const SpaceDesc& sp = H.space();
  PointSampler sampler(sp, seed);
  const double lo = H.identity_radius() / 10.0;
  const double hi = upper_radius(H);
  const double inside = H.identity_radius() * (1.0 - 1e-13);

  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    // Every 100th draw sits just inside the identity ball.
    const Vector x = (i % 100 == 0) ? sampler.on_sphere(inside) : sampler.log_radial(lo, hi);
    best = std::max(best, sp.norm_of(H.eval(x)));
  }
  return {best, samples, seed};
}

SampledSup estimate_c1(const BlidMap& H, int samples, std::uint64_t seed) {
  if (samples < 1000) throw UsageError("estimate_c1: need at least 1000 samples");
  const SpaceDesc& sp = H.space();
  PointSampler sampler(sp, seed);
  const double lo = H.identity_radius() / 10.0;
  const double hi = upper_radius(H);

  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = sampler.log_radial(lo, hi);
    const Vector v = sampler.unit_direction();
    best = std::max(best, sp.norm_of(H.dderiv(x, v)) / sp.norm_of(v));
    const double nx = sp.norm_of(x);
    best = std::max(best, sp.norm_of(H.dderiv(x, x)) / nx);
  }
  return {best, samples, seed};
}

}  // namespace blidkit
