#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>

namespace blidkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class SpaceKind { finite_dim, grid_function };
enum class NormKind { euclidean, sup };

/**
 * Either R^n with a chosen norm, or C[0,1] sampled on a uniform grid t_i = i/(N-1)
 * with the sup norm max_i |x(t_i)|.
 */
struct SpaceDesc {
  SpaceKind kind = SpaceKind::finite_dim;
  int dim = 1;        ///< n for finite_dim, N for grid_function
  NormKind norm = NormKind::euclidean;

  static SpaceDesc finite(int n, NormKind norm = NormKind::euclidean);
  static SpaceDesc grid(int n_samples);

  int size() const { return dim; }
  double norm_of(const Vector& x) const;
  /// Operator norm induced by this space's norm.
  double op_norm(const Matrix& a) const;
  /// Operator norm of diag(d).
  double diag_op_norm(const Vector& d) const { return d.cwiseAbs().maxCoeff(); }
  /// Sample times of the grid (empty for finite_dim).
  Vector grid_times() const;

  void check_point(const Vector& x, const char* what) const;
  std::string describe() const;

  bool operator==(const SpaceDesc&) const = default;
};

double op_norm(const Matrix& a, NormKind norm);

/// The diagonal of `a` when every off-diagonal entry is exactly zero.
std::optional<Vector> diagonal_of(const Matrix& a);

/// Deterministic sampler of points in a space, seeded once.
class PointSampler {
 public:
  PointSampler(const SpaceDesc& space, std::uint64_t seed) : space_(space), rng_(seed) {}

  /// Random direction of unit norm. Grid functions get a smooth random profile
  /// (a few random Fourier modes) mixed with white noise so both regimes are covered.
  Vector unit_direction();
  /// Point of exactly the given norm.
  Vector on_sphere(double radius) { return radius * unit_direction(); }
  /// Point with norm drawn log-uniformly from [lo, hi].
  Vector log_radial(double lo, double hi);
  /// Point with norm drawn uniformly from [0, radius).
  Vector in_ball(double radius);
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  SpaceDesc space_;
  std::mt19937_64 rng_;
};

}  // namespace blidkit
