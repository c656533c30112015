#include "blidkit/polynomial.hpp"

#include "blidkit/errors.hpp"

#include <cmath>
#include <numeric>

namespace blidkit {

int Monomial::degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

PolynomialMap::PolynomialMap(int dim, std::vector<Monomial> terms)
    : dim_(dim), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.coordinate < 0 || t.coordinate >= dim_) {
      throw ConfigError("polynomial: coordinate " + std::to_string(t.coordinate) + " out of range");
    }
    if (static_cast<int>(t.exponents.size()) != dim_) {
      throw ConfigError("polynomial: exponent list must have " + std::to_string(dim_) + " entries");
    }
    for (int e : t.exponents) {
      if (e < 0) throw ConfigError("polynomial: negative exponent");
    }
  }
}

Vector PolynomialMap::eval(const Vector& x) const {
  Vector out = Vector::Zero(dim_);
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (int j = 0; j < dim_; ++j) {
      for (int p = 0; p < t.exponents[j]; ++p) v *= x(j);
    }
    out(t.coordinate) += v;
  }
  return out;
}

Matrix PolynomialMap::jacobian(const Vector& x) const {
  Matrix jac = Matrix::Zero(dim_, dim_);
  for (const auto& t : terms_) {
    for (int k = 0; k < dim_; ++k) {
      if (t.exponents[k] == 0) continue;
      double v = t.coefficient * t.exponents[k];
      for (int j = 0; j < dim_; ++j) {
        const int e = j == k ? t.exponents[j] - 1 : t.exponents[j];
        for (int p = 0; p < e; ++p) v *= x(j);
      }
      jac(t.coordinate, k) += v;
    }
  }
  return jac;
}

int PolynomialMap::min_degree() const {
  if (terms_.empty()) return 0;
  int d = terms_.front().degree();
  for (const auto& t : terms_) d = std::min(d, t.degree());
  return d;
}

Vector PolynomialMap::coordinate_bounds(double r) const {
  Vector b = Vector::Zero(dim_);
  for (const auto& t : terms_) b(t.coordinate) += std::abs(t.coefficient) * std::pow(r, t.degree());
  return b;
}

NemytskiiMap::NemytskiiMap(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {}

double NemytskiiMap::g(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double NemytskiiMap::dg(double s) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * coeffs_[k];
  return acc;
}

Vector NemytskiiMap::eval(const Vector& x) const {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = g(x(i));
  return out;
}

Vector NemytskiiMap::jacobian_diagonal(const Vector& x) const {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = dg(x(i));
  return out;
}

double NemytskiiMap::bound(double r) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) acc += std::abs(coeffs_[k]) * std::pow(r, k);
  return acc;
}

NonlinearPart NonlinearPart::zero(const SpaceDesc& space) {
  if (space.kind == SpaceKind::grid_function) return NemytskiiMap({});
  return PolynomialMap(space.dim, {});
}

Vector NonlinearPart::eval(const Vector& x) const {
  return std::visit([&](const auto& m) { return m.eval(x); }, impl_);
}

Vector NonlinearPart::apply_jacobian(const Vector& y, const Vector& w) const {
  if (const auto* n = std::get_if<NemytskiiMap>(&impl_)) {
    return n->jacobian_diagonal(y).cwiseProduct(w);
  }
  return std::get<PolynomialMap>(impl_).jacobian(y) * w;
}

Matrix NonlinearPart::jacobian(const Vector& y) const {
  if (const auto* n = std::get_if<NemytskiiMap>(&impl_)) {
    return n->jacobian_diagonal(y).asDiagonal();
  }
  return std::get<PolynomialMap>(impl_).jacobian(y);
}

Vector NonlinearPart::jacobian_diagonal(const Vector& y) const {
  if (const auto* n = std::get_if<NemytskiiMap>(&impl_)) return n->jacobian_diagonal(y);
  throw UsageError("jacobian_diagonal: polynomial maps have dense Jacobians");
}

bool NonlinearPart::is_zero() const {
  if (const auto* n = std::get_if<NemytskiiMap>(&impl_)) {
    for (double c : n->coefficients()) {
      if (c != 0.0) return false;
    }
    return true;
  }
  for (const auto& t : std::get<PolynomialMap>(impl_).terms()) {
    if (t.coefficient != 0.0) return false;
  }
  return true;
}

double NonlinearPart::sup_bound(const SpaceDesc& space, double r) const {
  if (const auto* n = std::get_if<NemytskiiMap>(&impl_)) return n->bound(r);
  // |x_j| <= |x| in both the euclidean and the sup norm.
  const Vector b = std::get<PolynomialMap>(impl_).coordinate_bounds(r);
  return space.norm_of(b);
}

bool NonlinearPart::vanishes_to_second_order() const {
  if (const auto* n = std::get_if<NemytskiiMap>(&impl_)) {
    const auto& c = n->coefficients();
    return (c.size() < 1 || c[0] == 0.0) && (c.size() < 2 || c[1] == 0.0);
  }
  for (const auto& t : std::get<PolynomialMap>(impl_).terms()) {
    if (t.coefficient != 0.0 && t.degree() < 2) return false;
  }
  return true;
}

}  // namespace blidkit
