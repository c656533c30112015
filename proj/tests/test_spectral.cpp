#include "blidkit/errors.hpp"
#include "blidkit/spectral.hpp"

#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace blidkit;

namespace {

// Independent oracle: P_s from the complex eigendecomposition.
Matrix eigen_projector(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a);
  const Eigen::MatrixXcd v = es.eigenvectors();
  Eigen::VectorXcd mask(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) mask(i) = std::abs(es.eigenvalues()(i)) < 1.0 ? 1.0 : 0.0;
  return (v * mask.asDiagonal() * v.inverse()).real();
}

double rel(const Matrix& e, const Matrix& scale) { return e.norm() / std::max(1.0, scale.norm()); }

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("projector identities and invariance on random hyperbolic matrices") {
  std::mt19937_64 rng(42);
  double worst = 0.0, worst_oracle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 15;
    const Matrix a = testing::random_hyperbolic(n, rng);
    const HyperbolicSplitting s = split(a);
    const Matrix id = Matrix::Identity(n, n);
    worst = std::max({worst, rel(s.p_s * s.p_s - s.p_s, s.p_s), rel(s.p_u * s.p_u - s.p_u, s.p_u),
                      rel(s.p_s + s.p_u - id, id), rel(s.p_s * s.p_u, s.p_s),
                      rel(a * s.p_s - s.p_s * a, a * s.p_s),
                      rel(a * s.stable_basis - s.stable_basis * s.lambda_s, a),
                      rel(a * s.unstable_basis - s.unstable_basis * s.lambda_u, a * s.p_u),
                      rel(s.stable_basis * s.stable_coords - s.p_s, s.p_s),
                      rel(s.unstable_basis * s.unstable_coords - s.p_u, s.p_u)});
    worst_oracle = std::max(worst_oracle, rel(s.p_s - eigen_projector(a), s.p_s));
    CHECK(s.stable_dim() + s.unstable_dim() == n);
    for (int i = 0; i < s.stable_dim(); ++i) CHECK(std::abs(s.eigenvalues[i]) < 1.0);
    for (int i = s.stable_dim(); i < n; ++i) CHECK(std::abs(s.eigenvalues[i]) > 1.0);
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_oracle <= 1e-8);
}

TEST_CASE("diagonal fast path agrees with the Schur path") {
  Vector d(5);
  d << 0.3, 2.0, -0.7, 1.5, -3.0;
  const HyperbolicSplitting fast = split(d.asDiagonal());
  Matrix nearly = d.asDiagonal();
  nearly(0, 1) = 1e-300;  // not exactly diagonal: takes the LAPACK path
  const HyperbolicSplitting slow = split(nearly);
  CHECK((fast.p_s - slow.p_s).norm() <= 1e-12);
  CHECK(fast.stable_dim() == 2);
  CHECK(fast.gap == doctest::Approx(0.3));
  CHECK(fast.stable->lo == doctest::Approx(0.3));
  CHECK(fast.unstable->hi == doctest::Approx(3.0));
  CHECK((d.asDiagonal() * fast.stable_basis - fast.stable_basis * fast.lambda_s).norm() == 0.0);
}

TEST_CASE("non-hyperbolic and singular matrices are rejected") {
  Matrix a(2, 2);
  a << 0.5, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(split(a), NonHyperbolicError);
  Matrix rot(2, 2);
  rot << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  CHECK_THROWS_AS(split(rot), NonHyperbolicError);
  Matrix sing(2, 2);
  sing << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(split(sing), ConfigError);
  CHECK_THROWS_AS(split(Matrix(Vector::Zero(2).asDiagonal())), ConfigError);
  Matrix close(1, 1);
  close << 1.0 + 1e-7;
  CHECK_THROWS_AS(split(close), NonHyperbolicError);
  CHECK_NOTHROW(split(close, 1e-8));
}

TEST_CASE("band-width predicate") {
  Vector d(2);
  d << 0.5, 2.0;
  BandWidthReport r = band_width_check(split(d.asDiagonal()), 1.0);
  CHECK(r.satisfied);
  REQUIRE(r.beta_predicted);
  CHECK(*r.beta_predicted == 1.0);
  CHECK(std::isinf(r.stable_ratio_term));

  Vector d3(3);
  d3 << 0.2, 0.9, 2.0;
  r = band_width_check(split(d3.asDiagonal()), 1.0);
  CHECK(r.stable_ratio_term == doctest::Approx(std::log(0.2) / std::log(0.9) - 1.0));
  CHECK(*r.beta_predicted == 1.0);

  // A wide stable band caps beta below alpha.
  d3 << 0.5, 0.6, 3.0;
  r = band_width_check(split(d3.asDiagonal()), 1.0);
  CHECK(*r.beta_predicted == doctest::Approx(std::log(0.5) / std::log(0.6) - 1.0));
  CHECK(*r.beta_predicted < 1.0);

  r = band_width_check(split(d3.asDiagonal()), 0.7, "holder_only");
  CHECK(*r.beta_predicted == 0.7);
  CHECK_THROWS_AS(band_width_check(split(d3.asDiagonal()), 1.0, "nope"), ConfigError);
  CHECK_THROWS_AS(band_width_check(split(d3.asDiagonal()), 0.0), ConfigError);
  CHECK(band_width_predicates().size() == 2);
}

TEST_CASE("adapted norms approach the spectral radii") {
  std::mt19937_64 rng(7);
  const Matrix a = testing::random_hyperbolic(6, rng);
  const HyperbolicSplitting s = split(a);
  double rs = 0.0, ru = 0.0;
  for (const auto& z : s.eigenvalues) {
    if (std::abs(z) < 1.0) rs = std::max(rs, std::abs(z));
    else ru = std::max(ru, 1.0 / std::abs(z));
  }
  const AdaptedNorms n = adapted_operator_norms(s, 512);
  if (s.stable_dim() > 0) CHECK(n.rho_s == doctest::Approx(rs).epsilon(0.02));
  if (s.unstable_dim() > 0) CHECK(n.rho_u == doctest::Approx(ru).epsilon(0.02));
  CHECK_THROWS_AS(adapted_operator_norms(s, 0), UsageError);
  Vector d(2);
  d << 0.5, 2.0;
  const AdaptedNorms dn = adapted_operator_norms(split(d.asDiagonal()), 8, NormKind::sup);
  CHECK(dn.rho_s == 0.5);
  CHECK(dn.rho_u == 0.5);
}

}
