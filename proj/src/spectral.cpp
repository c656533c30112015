#include "blidkit/spectral.hpp"

#include "blidkit/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace blidkit {
namespace {

lapack_logical inside_unit_circle(const double* re, const double* im) {
  return std::hypot(*re, *im) < 1.0;
}

Matrix matrix_power(Matrix base, int k) {
  Matrix result = Matrix::Identity(base.rows(), base.cols());
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateBand = 1e-9;

// ln(num)/ln(den) - 1 for the two ends of a band; +inf when the band is a single modulus.
double ratio_term(double num, double den) {
  if (std::abs(num - den) <= kDegenerateBand * std::max(std::abs(num), std::abs(den))) {
    return kInf;
  }
  return std::log(num) / std::log(den) - 1.0;
}

using Predicate = std::function<void(const HyperbolicSplitting&, BandWidthReport&)>;

const std::map<std::string, Predicate>& predicate_table() {
  static const std::map<std::string, Predicate> table = {
      {"gap_ratio",
       [](const HyperbolicSplitting& s, BandWidthReport& r) {
         r.stable_ratio_term = s.stable ? ratio_term(s.stable->lo, s.stable->hi) : kInf;
         r.unstable_ratio_term = s.unstable ? ratio_term(s.unstable->hi, s.unstable->lo) : kInf;
         const double beta = std::min({r.alpha, r.stable_ratio_term, r.unstable_ratio_term});
         if (beta > 0.0) r.beta_predicted = std::min(beta, r.alpha);
       }},
      // No band constraint at all: beta = alpha.
      {"holder_only",
       [](const HyperbolicSplitting&, BandWidthReport& r) {
         r.stable_ratio_term = kInf;
         r.unstable_ratio_term = kInf;
         r.beta_predicted = r.alpha;
       }},
  };
  return table;
}

void fill_spectrum(HyperbolicSplitting& s, const std::vector<double>& wr,
                   const std::vector<double>& wi, double tol) {
  s.gap = kInf;
  for (std::size_t i = 0; i < wr.size(); ++i) {
    const double mod = std::hypot(wr[i], wi[i]);
    s.eigenvalues.emplace_back(wr[i], wi[i]);
    s.gap = std::min(s.gap, std::abs(mod - 1.0));
    auto& side = mod < 1.0 ? s.stable : s.unstable;
    if (!side) side = Annulus{mod, mod};
    side->lo = std::min(side->lo, mod);
    side->hi = std::max(side->hi, mod);
  }
  if (!(s.gap > tol)) {
    std::ostringstream msg;
    msg << "split: Lambda is not hyperbolic (an eigenvalue has modulus within " << tol
        << " of 1; gap = " << s.gap << ")";
    throw NonHyperbolicError(msg.str());
  }
}

// Diagonal Lambda: the splitting is a coordinate permutation, no factorization needed.
HyperbolicSplitting split_diagonal(const Matrix& lambda, const Vector& d, double tol) {
  const Eigen::Index n = d.size();
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i) if (std::abs(d(i)) < 1.0) order.push_back(i);
  const Eigen::Index k = static_cast<Eigen::Index>(order.size());
  for (Eigen::Index i = 0; i < n; ++i) if (!(std::abs(d(i)) < 1.0)) order.push_back(i);

  HyperbolicSplitting s;
  s.lambda = lambda;
  std::vector<double> wr(n), wi(n, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) wr[j] = d(order[j]);
  fill_spectrum(s, wr, wi, tol);

  const Eigen::Index m = n - k;
  s.stable_basis = Matrix::Zero(n, k);
  s.unstable_basis = Matrix::Zero(n, m);
  s.lambda_s = Matrix::Zero(k, k);
  s.lambda_u = Matrix::Zero(m, m);
  Vector mask = Vector::Zero(n);
  for (Eigen::Index j = 0; j < k; ++j) {
    s.stable_basis(order[j], j) = 1.0;
    s.lambda_s(j, j) = wr[j];
    mask(order[j]) = 1.0;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    s.unstable_basis(order[k + j], j) = 1.0;
    s.lambda_u(j, j) = wr[k + j];
  }
  s.stable_coords = s.stable_basis.transpose();
  s.unstable_coords = s.unstable_basis.transpose();
  s.p_s = mask.asDiagonal();
  s.p_u = Vector(Vector::Ones(n) - mask).asDiagonal();
  return s;
}

}  // namespace

HyperbolicSplitting split(const Matrix& lambda, double tol) {
  const Eigen::Index n = lambda.rows();
  if (n == 0 || lambda.cols() != n) throw ConfigError("split: Lambda must be square and non-empty");
  if (!lambda.allFinite()) throw ConfigError("split: Lambda has non-finite entries");
  if (const auto d = diagonal_of(lambda)) {
    if ((d->array() == 0.0).any()) throw ConfigError("split: Lambda is singular (invalid input)");
    return split_diagonal(lambda, *d, tol);
  }
  Eigen::FullPivLU<Matrix> lu(lambda);
  if (!lu.isInvertible()) throw ConfigError("split: Lambda is singular (invalid input)");

  Matrix t = lambda;
  Matrix q(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', inside_unit_circle, static_cast<lapack_int>(n),
                    t.data(), static_cast<lapack_int>(n), &sdim, wr.data(), wi.data(), q.data(),
                    static_cast<lapack_int>(n));
  if (info != 0) {
    throw NumericalError("split: dgees failed with info " + std::to_string(info), 0.0);
  }

  HyperbolicSplitting s;
  s.lambda = lambda;
  fill_spectrum(s, wr, wi, tol);

  const Eigen::Index k = sdim;
  const Eigen::Index m = n - k;
  Matrix y = Matrix::Zero(k, m);
  if (k > 0 && m > 0) {
    // T11 Y - Y T22 = -T12 makes diag(T11, T22) similar to T via [[I, Y], [0, I]].
    Matrix t11 = t.topLeftCorner(k, k);
    Matrix t22 = t.bottomRightCorner(m, m);
    y = -t.topRightCorner(k, m);
    double scale = 1.0;
    const lapack_int sinfo = LAPACKE_dtrsyl(
        LAPACK_COL_MAJOR, 'N', 'N', -1, static_cast<lapack_int>(k), static_cast<lapack_int>(m),
        t11.data(), static_cast<lapack_int>(k), t22.data(), static_cast<lapack_int>(m), y.data(),
        static_cast<lapack_int>(k), &scale);
    if (sinfo < 0) throw NumericalError("split: dtrsyl rejected its arguments", 0.0);
    y /= scale;
  }

  Matrix block = Matrix::Zero(n, n);
  block.topLeftCorner(k, k).setIdentity();
  block.topRightCorner(k, m) = -y;
  s.p_s = q * block * q.transpose();
  s.p_u = Matrix::Identity(n, n) - s.p_s;
  s.stable_basis = q.leftCols(k);
  s.unstable_basis = q.leftCols(k) * y + q.rightCols(m);
  s.stable_coords = q.leftCols(k).transpose() - y * q.rightCols(m).transpose();
  s.unstable_coords = q.rightCols(m).transpose();
  s.lambda_s = t.topLeftCorner(k, k);
  s.lambda_u = t.bottomRightCorner(m, m);
  return s;
}

std::vector<std::string> band_width_predicates() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : predicate_table()) names.push_back(name);
  return names;
}

BandWidthReport band_width_check(const HyperbolicSplitting& s, double alpha,
                                 const std::string& predicate) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("band_width_check: alpha must lie in (0, 1]");
  const auto& table = predicate_table();
  const auto it = table.find(predicate);
  if (it == table.end()) throw ConfigError("band_width_check: unknown predicate '" + predicate + "'");
  BandWidthReport r;
  r.alpha = alpha;
  r.predicate_name = predicate;
  it->second(s, r);
  r.satisfied = r.beta_predicted.has_value() && *r.beta_predicted > 0.0;
  return r;
}

AdaptedNorms adapted_operator_norms(const HyperbolicSplitting& s, int k, NormKind norm) {
  if (k < 1) throw UsageError("adapted_operator_norms: k must be >= 1");
  AdaptedNorms out;
  const double inv_k = 1.0 / k;
  if (const auto d = diagonal_of(s.lambda)) {
    // |diag^k P| = max |d_i|^k over the retained coordinates, in either norm.
    for (Eigen::Index i = 0; i < d->size(); ++i) {
      const double a = std::abs((*d)(i));
      if (a < 1.0) out.rho_s = std::max(out.rho_s, a);
      else out.rho_u = std::max(out.rho_u, 1.0 / a);
    }
    return out;
  }
  // Lambda^k P_s = B_s Lambda_s^k W_s: powering the restricted blocks keeps the unstable
  // growth out of the product.
  if (s.stable_dim() > 0) {
    out.rho_s = std::pow(op_norm(s.stable_basis * matrix_power(s.lambda_s, k) * s.stable_coords, norm), inv_k);
  }
  if (s.unstable_dim() > 0) {
    const Matrix inv = s.lambda_u.inverse();
    out.rho_u = std::pow(op_norm(s.unstable_basis * matrix_power(inv, k) * s.unstable_coords, norm), inv_k);
  }
  return out;
}

}  // namespace blidkit
