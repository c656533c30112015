#pragma once

#include "blidkit/space.hpp"

#include <variant>
#include <vector>

namespace blidkit {

/// One monomial c * prod_j x_j^e_j contributing to output coordinate `coordinate`.
struct Monomial {
  int coordinate = 0;
  double coefficient = 0.0;
  std::vector<int> exponents;

  int degree() const;
};

/// Vector polynomial map R^n -> R^n given as a monomial table.
class PolynomialMap {
 public:
  PolynomialMap(int dim, std::vector<Monomial> terms);

  int dim() const { return dim_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  Vector eval(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  /// Lowest total degree among the terms (0 when there are no terms).
  int min_degree() const;
  /// Per-coordinate bound sum |c| r^deg, valid whenever |x_j| <= r for all j.
  Vector coordinate_bounds(double r) const;

 private:
  int dim_;
  std::vector<Monomial> terms_;
};

/// Scalar polynomial g(s) = sum_k c_k s^k applied sample-wise: (f(x))(t_i) = g(x(t_i)).
class NemytskiiMap {
 public:
  explicit NemytskiiMap(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const { return coeffs_; }
  double g(double s) const;
  double dg(double s) const;
  Vector eval(const Vector& x) const;
  Vector jacobian_diagonal(const Vector& x) const;
  /// sum |c_k| r^k, valid for |s| <= r.
  double bound(double r) const;

 private:
  std::vector<double> coeffs_;
};

/// The nonlinear part f of F = Lambda + f.
class NonlinearPart {
 public:
  NonlinearPart(PolynomialMap p) : impl_(std::move(p)) {}
  NonlinearPart(NemytskiiMap n) : impl_(std::move(n)) {}

  /// The zero map on a space.
  static NonlinearPart zero(const SpaceDesc& space);

  Vector eval(const Vector& x) const;
  /// Df(y) w
  Vector apply_jacobian(const Vector& y, const Vector& w) const;
  bool is_diagonal() const { return std::holds_alternative<NemytskiiMap>(impl_); }
  Matrix jacobian(const Vector& y) const;
  Vector jacobian_diagonal(const Vector& y) const;
  bool is_zero() const;
  /// Upper bound on sup |f(y)| over the ball |y| <= r (in the space norm).
  double sup_bound(const SpaceDesc& space, double r) const;
  /// f(0) = 0 and Df(0) = 0 hold structurally (no constant or linear monomials).
  bool vanishes_to_second_order() const;

  const std::variant<PolynomialMap, NemytskiiMap>& impl() const { return impl_; }

 private:
  std::variant<PolynomialMap, NemytskiiMap> impl_;
};

}  // namespace blidkit
