#pragma once

#include "blidkit/bump.hpp"
#include "blidkit/space.hpp"

#include <cstdint>
#include <optional>

namespace blidkit {

enum class BlidVariant { radial, pointwise };

/// Empirical supremum with the sampling metadata needed to reproduce it.
struct SampledSup {
  double value = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/**
 * Bounded local identity map H: X -> X.
 *
 * radial:    H(x) = h(|x|^2) x           (R^n, Euclidean norm), identity for |x| < sqrt(r1)
 * pointwise: H(x)(t_i) = h(x(t_i)) x(t_i) (grid functions, or R^n with the sup norm),
 *            identity for |x|_sup <= r1
 *
 * c0 and c1 are the declared bounds on sup|H| and sup|DH|. They default to the
 * analytic bounds of each construction and may be overridden by a scenario.
 */
class BlidMap {
 public:
  BlidMap(SpaceDesc space, BlidVariant variant, BumpFunction bump);

  Vector eval(const Vector& x) const;
  /// DH(x) v
  Vector dderiv(const Vector& x, const Vector& v) const;
  /// Dense Jacobian DH(x). Use only for small spaces.
  Matrix jacobian(const Vector& x) const;
  /// Diagonal of DH(x) for the pointwise variant (DH is diagonal there).
  Vector jacobian_diagonal(const Vector& x) const;
  /// Exact operator norm |DH(x)| in the space norm.
  double deriv_norm(const Vector& x) const;

  const SpaceDesc& space() const { return space_; }
  BlidVariant variant() const { return variant_; }
  const BumpFunction& bump() const { return bump_; }
  double identity_radius() const { return identity_radius_; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  void declare_bounds(std::optional<double> c0, std::optional<double> c1);

 private:
  SpaceDesc space_;
  BlidVariant variant_;
  BumpFunction bump_;
  double identity_radius_;
  double c0_;
  double c1_;
};

BlidMap make_radial_blid(const SpaceDesc& space, const BumpFunction& h);
BlidMap make_pointwise_blid(const SpaceDesc& space, const BumpFunction& h);

Vector blid_eval(const BlidMap& H, const Vector& x);
Vector blid_dderiv(const BlidMap& H, const Vector& x, const Vector& v);

/// Max of |H(x)| over seeded samples with radii log-uniform in
/// [delta0/10, 10 r2 max(1, sqrt n)], plus points just inside the identity ball.
SampledSup estimate_c0(const BlidMap& H, int samples, std::uint64_t seed);

/// Max of |DH(x) v| / |v| over seeded (x, v) pairs.
SampledSup estimate_c1(const BlidMap& H, int samples, std::uint64_t seed);

}  // namespace blidkit
