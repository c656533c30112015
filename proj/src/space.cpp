#include "blidkit/space.hpp"

#include "blidkit/errors.hpp"

#include <cmath>
#include <numbers>

namespace blidkit {

SpaceDesc SpaceDesc::finite(int n, NormKind norm) {
  if (n < 1) throw ConfigError("space: dim must be >= 1");
  return SpaceDesc{SpaceKind::finite_dim, n, norm};
}

SpaceDesc SpaceDesc::grid(int n_samples) {
  if (n_samples < 2) throw ConfigError("space: grid_size must be >= 2");
  return SpaceDesc{SpaceKind::grid_function, n_samples, NormKind::sup};
}

double SpaceDesc::norm_of(const Vector& x) const {
  return norm == NormKind::sup ? x.cwiseAbs().maxCoeff() : x.norm();
}

std::optional<Vector> diagonal_of(const Matrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j && a(i, j) != 0.0) return std::nullopt;
    }
  }
  return Vector(a.diagonal());
}

double op_norm(const Matrix& a, NormKind norm) {
  if (a.size() == 0) return 0.0;
  if (norm == NormKind::sup) {
    return a.cwiseAbs().rowwise().sum().maxCoeff();
  }
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double SpaceDesc::op_norm(const Matrix& a) const { return blidkit::op_norm(a, norm); }

Vector SpaceDesc::grid_times() const {
  if (kind != SpaceKind::grid_function) return {};
  return Vector::LinSpaced(dim, 0.0, 1.0);
}

void SpaceDesc::check_point(const Vector& x, const char* what) const {
  if (x.size() != dim) {
    throw UsageError(std::string(what) + ": dimension mismatch (expected " +
                     std::to_string(dim) + ", got " + std::to_string(x.size()) + ")");
  }
}

std::string SpaceDesc::describe() const {
  if (kind == SpaceKind::grid_function) {
    return "grid_function(N=" + std::to_string(dim) + ", sup)";
  }
  return "finite_dim(n=" + std::to_string(dim) + ", " +
         (norm == NormKind::sup ? "sup" : "euclidean") + ")";
}

Vector PointSampler::unit_direction() {
  const int n = space_.dim;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  if (space_.kind == SpaceKind::grid_function) {
    // Smooth low-frequency profile plus a small rough component.
    const Vector t = space_.grid_times();
    const int modes = 4;
    v.setZero();
    for (int k = 0; k < modes; ++k) {
      const double amp = gauss(rng_) / (1.0 + k);
      const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng_);
      v += amp * (2.0 * std::numbers::pi * k * t.array() + phase).cos().matrix();
    }
    for (int i = 0; i < n; ++i) v(i) += 0.25 * gauss(rng_);
  } else {
    for (int i = 0; i < n; ++i) v(i) = gauss(rng_);
  }
  double nv = space_.norm_of(v);
  while (!(nv > 0.0)) {
    for (int i = 0; i < n; ++i) v(i) = gauss(rng_);
    nv = space_.norm_of(v);
  }
  return v / nv;
}

Vector PointSampler::log_radial(double lo, double hi) {
  const double r = std::exp(uniform(std::log(lo), std::log(hi)));
  return on_sphere(r);
}

Vector PointSampler::in_ball(double radius) { return on_sphere(uniform(0.0, radius)); }

}  // namespace blidkit
