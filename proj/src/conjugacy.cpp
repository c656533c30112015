#include "blidkit/conjugacy.hpp"

#include "blidkit/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace blidkit {
namespace {

// Norms |B A^k W| for k = 0, 1, ... until the geometric tail estimate
// sup_f * |B A^k W| / (1 - rho) drops below `budget`. Returns the number of terms needed
// and the summed weights (including the geometric tail).
struct SeriesPlan {
  int terms = 0;
  double weight_sum = 0.0;
};

SeriesPlan plan_series(const Matrix& basis, const Matrix& step, const Matrix& coords, bool shift,
                       double sup_f, double rho, double budget, int max_terms, NormKind norm,
                       const char* side) {
  SeriesPlan plan;
  if (basis.cols() == 0 || sup_f == 0.0) return plan;
  if (!(rho < 1.0)) {
    throw NumericalError(std::string("conjugacy: ") + side + " series does not contract (rho = " +
                             std::to_string(rho) + ")",
                         rho);
  }
  Matrix power = shift ? step : Matrix::Identity(step.rows(), step.cols());
  for (int k = 0; k < max_terms; ++k) {
    const double w = op_norm(basis * power * coords, norm);
    const double tail = sup_f * w / (1.0 - rho);
    if (tail <= budget) {
      plan.terms = k;
      plan.weight_sum += w / (1.0 - rho);
      return plan;
    }
    plan.weight_sum += w;
    power = step * power;
  }
  std::ostringstream msg;
  msg << "conjugacy: " << side << " series tail did not reach the truncation budget " << budget
      << " within " << max_terms << " terms";
  throw NumericalError(msg.str(), budget);
}

// Same plan for weights w_k = scale * rho^k (diagonal Lambda, projections are coordinate masks).
SeriesPlan plan_geometric(double scale, double rho, double sup_f, double budget, int max_terms,
                          const char* side) {
  SeriesPlan plan;
  if (scale == 0.0 || sup_f == 0.0) return plan;
  double w = scale;
  for (int k = 0; k < max_terms; ++k) {
    if (sup_f * w / (1.0 - rho) <= budget) {
      plan.terms = k;
      plan.weight_sum += w / (1.0 - rho);
      return plan;
    }
    plan.weight_sum += w;
    w *= rho;
  }
  std::ostringstream msg;
  msg << "conjugacy: " << side << " series tail did not reach the truncation budget " << budget
      << " within " << max_terms << " terms";
  throw NumericalError(msg.str(), budget);
}

}  // namespace

std::string to_string(Realization r) {
  switch (r) {
    case Realization::automatic: return "auto";
    case Realization::bounded: return "bounded";
    case Realization::koenigs: return "koenigs";
  }
  return "?";
}

ConjugacySolver::ConjugacySolver(GlobalizedMap G, HyperbolicSplitting S, SolverOptions options)
    : G_(std::move(G)), S_(std::move(S)), opt_(options) {
  const SpaceDesc& sp = G_.space();
  const MapSpec& base = G_.base();
  if (S_.lambda.rows() != sp.dim || S_.lambda.cols() != sp.dim || S_.lambda != base.lambda) {
    throw ConfigError("conjugacy: splitting was computed for a different Lambda");
  }
  if (!(opt_.series_tol > 0.0) || !(opt_.inversion_tol > 0.0) || opt_.max_terms < 1 ||
      opt_.inversion_max_iters < 1) {
    throw ConfigError("conjugacy: tolerances must be > 0 and iteration limits >= 1");
  }

  diag_ = diagonal_of(base.lambda);
  if (diag_) {
    stable_mask_ = (diag_->array().abs() < 1.0).cast<double>();
    lambda_norm_ = diag_->cwiseAbs().maxCoeff();
    lambda_inv_norm_ = diag_->cwiseAbs().cwiseInverse().maxCoeff();
  } else {
    lambda_inv_ = base.lambda.inverse();
    lambda_norm_ = sp.op_norm(base.lambda);
    lambda_inv_norm_ = sp.op_norm(lambda_inv_);
  }
  contraction_ = G_.lipschitz_bound() * lambda_inv_norm_;
  if (!(contraction_ < 1.0)) {
    std::ostringstream msg;
    msg << "conjugacy: contraction budget Lip(f~)*|Lambda^-1| < 1 violated (delta_eta*c1 = "
        << G_.lipschitz_bound() << ", |Lambda^-1| = " << lambda_inv_norm_ << ")";
    throw ConfigError(msg.str());
  }
  holder_bound_ = base.holder_constant * G_.blid().c1() * std::pow(G_.m(), base.alpha);

  decoupled_ = diag_.has_value() && base.f.is_diagonal() &&
               G_.blid().variant() == BlidVariant::pointwise;
  const bool one_sided = S_.stable_dim() == 0 || S_.unstable_dim() == 0;
  realization_ = opt_.realization;
  if (realization_ == Realization::automatic) {
    realization_ = one_sided || decoupled_ ? Realization::koenigs : Realization::bounded;
  }
  if (realization_ == Realization::koenigs && !one_sided && !decoupled_) {
    throw ConfigError(
        "conjugacy: the koenigs realization needs a one-sided spectrum or a decoupled system");
  }

  if (realization_ == Realization::bounded) {
    const double sup_f = G_.sup_f_tilde_bound();
    const AdaptedNorms rho = adapted_operator_norms(S_, 64, sp.norm);
    const double budget = opt_.series_tol / 4.0;
    if (diag_) {
      const SeriesPlan ps = plan_geometric(S_.stable_dim() > 0 ? 1.0 : 0.0, rho.rho_s, sup_f,
                                           budget, opt_.max_terms, "stable");
      const SeriesPlan pu = plan_geometric(rho.rho_u, rho.rho_u, sup_f, budget, opt_.max_terms,
                                           "unstable");
      terms_s_ = ps.terms;
      terms_u_ = pu.terms;
      phi_sup_bound_ = sup_f * (ps.weight_sum + pu.weight_sum);
      return;
    }
    const SeriesPlan ps = plan_series(S_.stable_basis, S_.lambda_s, S_.stable_coords, false,
                                      sup_f, rho.rho_s, budget, opt_.max_terms, sp.norm, "stable");
    const Matrix lambda_u_inv =
        S_.unstable_dim() > 0 ? Matrix(S_.lambda_u.inverse()) : Matrix(0, 0);
    const SeriesPlan pu = plan_series(S_.unstable_basis, lambda_u_inv, S_.unstable_coords, true,
                                      sup_f, rho.rho_u, budget, opt_.max_terms, sp.norm, "unstable");
    terms_s_ = ps.terms;
    terms_u_ = pu.terms;
    phi_sup_bound_ = sup_f * (ps.weight_sum + pu.weight_sum);
  } else if (decoupled_ && !one_sided) {
    phi_sup_bound_ = std::numeric_limits<double>::infinity();
  } else {
    // Norms of the weight powers |A^j|, A = Lambda^-1 (contracting side) or Lambda.
    if (diag_) {
      const double a = S_.unstable_dim() == 0 ? lambda_inv_norm_ : lambda_norm_;
      double w = 1.0;
      for (int j = 0; j <= opt_.max_terms + 1; ++j) {
        koenigs_weight_norms_.push_back(w);
        if (!std::isfinite(w) || w > 1e300) break;
        w *= a;
      }
      phi_sup_bound_ = std::numeric_limits<double>::infinity();
      return;
    }
    const Matrix& step = S_.unstable_dim() == 0 ? lambda_inv_ : base.lambda;
    Matrix power = Matrix::Identity(sp.dim, sp.dim);
    koenigs_weight_norms_.reserve(opt_.max_terms + 2);
    for (int j = 0; j <= opt_.max_terms + 1; ++j) {
      const double w = sp.op_norm(power);
      koenigs_weight_norms_.push_back(w);
      if (!std::isfinite(w) || w > 1e300) break;
      power = step * power;
    }
    phi_sup_bound_ = std::numeric_limits<double>::infinity();
  }
}

Vector ConjugacySolver::apply_lambda_inv(const Vector& x) const {
  if (diag_) return x.cwiseQuotient(*diag_);
  return lambda_inv_ * x;
}

Vector ConjugacySolver::invert_F(const Vector& y) const {
  const SpaceDesc& sp = G_.space();
  sp.check_point(y, "invert_F");
  const double target = opt_.inversion_tol * std::max(1.0, sp.norm_of(y));
  Vector x = apply_lambda_inv(y);
  double res = 0.0;
  for (int it = 0; it < opt_.inversion_max_iters; ++it) {
    const Vector r = G_.eval_F(x) - y;
    res = sp.norm_of(r);
    if (res <= target) return x;
    x -= apply_lambda_inv(r);
  }
  std::ostringstream msg;
  msg << "invert_F: no convergence within " << opt_.inversion_max_iters
      << " iterations (residual " << res << ")";
  throw NumericalError(msg.str(), res);
}

ConjugacySolver::Parts ConjugacySolver::phi_bounded(const Vector& x) const {
  const int n = G_.space().dim;
  Parts parts{Vector::Zero(n), Vector::Zero(n)};

  if (terms_u_ > 0) {
    // sum_k Lambda_u^-(k+1) W_u f~(F~^k x), evaluated by Horner in unstable coordinates.
    std::vector<Vector> coeffs;
    coeffs.reserve(terms_u_);
    Vector y = x;
    for (int k = 0; k < terms_u_; ++k) {
      coeffs.push_back(S_.unstable_coords * G_.f_tilde(y));
      if (k + 1 < terms_u_) y = G_.eval_F(y);
    }
    const Eigen::PartialPivLU<Matrix> lu(S_.lambda_u);
    Vector acc = Vector::Zero(S_.unstable_dim());
    for (int k = terms_u_ - 1; k >= 0; --k) acc = lu.solve(Vector(coeffs[k] + acc));
    parts.unstable = S_.unstable_basis * acc;
  }

  if (terms_s_ > 0) {
    // -sum_k Lambda_s^k W_s f~(F~^-(k+1) x)
    std::vector<Vector> coeffs;
    coeffs.reserve(terms_s_);
    Vector z = x;
    for (int k = 0; k < terms_s_; ++k) {
      z = invert_F(z);
      coeffs.push_back(S_.stable_coords * G_.f_tilde(z));
    }
    Vector acc = Vector::Zero(S_.stable_dim());
    for (int k = terms_s_ - 1; k >= 0; --k) acc = coeffs[k] + S_.lambda_s * acc;
    parts.stable = -(S_.stable_basis * acc);
  }
  return parts;
}

ConjugacySolver::Parts ConjugacySolver::phi_bounded_diagonal(const Vector& x) const {
  const int n = G_.space().dim;
  const Vector unstable_mask = Vector::Ones(n) - stable_mask_;
  Parts parts{Vector::Zero(n), Vector::Zero(n)};
  if (terms_u_ > 0) {
    std::vector<Vector> coeffs;
    coeffs.reserve(terms_u_);
    Vector y = x;
    for (int k = 0; k < terms_u_; ++k) {
      coeffs.push_back(unstable_mask.cwiseProduct(G_.f_tilde(y)));
      if (k + 1 < terms_u_) y = G_.eval_F(y);
    }
    Vector acc = Vector::Zero(n);
    for (int k = terms_u_ - 1; k >= 0; --k) acc = (coeffs[k] + acc).cwiseQuotient(*diag_);
    parts.unstable = acc;
  }
  if (terms_s_ > 0) {
    std::vector<Vector> coeffs;
    coeffs.reserve(terms_s_);
    Vector z = x;
    for (int k = 0; k < terms_s_; ++k) {
      z = invert_F(z);
      coeffs.push_back(stable_mask_.cwiseProduct(G_.f_tilde(z)));
    }
    Vector acc = Vector::Zero(n);
    for (int k = terms_s_ - 1; k >= 0; --k) acc = coeffs[k] + diag_->cwiseProduct(acc);
    parts.stable = -acc;
  }
  return parts;
}

ConjugacySolver::Parts ConjugacySolver::phi_koenigs_decoupled(const Vector& x) const {
  // Each coordinate is a 1D map t -> lambda_i t + g~(t); the tail bounds below are the 1D
  // Koenigs bounds taken coordinate by coordinate, so only |lambda_i| enters each one.
  const int n = G_.space().dim;
  const double alpha = G_.base().alpha;
  const double kh = holder_bound_ / (1.0 + alpha);
  const double budget = opt_.series_tol / 2.0;
  const int max_k = opt_.max_terms;
  const Eigen::ArrayXd lam = diag_->array().abs();
  const Eigen::ArrayXd smask = stable_mask_.array();
  const Eigen::ArrayXd umask = 1.0 - smask;
  Parts parts{Vector::Zero(n), Vector::Zero(n)};

  auto fail = [&](double tail) {
    std::ostringstream msg;
    msg << "phi: coordinatewise Koenigs series did not reach series_tol within " << max_k
        << " terms";
    throw NumericalError(msg.str(), tail);
  };

  if ((smask > 0.0).any()) {
    // Contracting coordinates: sum_k lambda^-(k+1) g~(F~^k x).
    std::vector<Vector> terms;
    Vector y = (smask * x.array()).matrix();
    Eigen::ArrayXd inv_pow = lam.inverse();  // lambda^-(k+1)
    double tail = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 0; k <= max_k; ++k) {
      const Eigen::ArrayXd ny = y.array().abs();
      const Eigen::ArrayXd q = lam + kh * ny.pow(alpha);
      const Eigen::ArrayXd ratio = q.pow(1.0 + alpha) / lam;
      const Eigen::ArrayXd t = kh * ny.pow(1.0 + alpha) * inv_pow / (1.0 - ratio);
      const bool ok = ((smask == 0.0) || (q < 1.0 && ratio < 1.0)).all();
      if (ok) {
        tail = (smask * t).maxCoeff();
        if (tail <= budget) {
          converged = true;
          break;
        }
      }
      terms.push_back((smask * G_.f_tilde(y).array()).matrix());
      y = G_.eval_F(y);
      inv_pow /= lam;
    }
    if (!converged) fail(tail);
    Vector acc = Vector::Zero(n);
    for (int k = static_cast<int>(terms.size()) - 1; k >= 0; --k) acc = apply_lambda_inv(terms[k] + acc);
    parts.stable = (smask * acc.array()).matrix();
  }

  if ((umask > 0.0).any()) {
    // Expanding coordinates: -sum_k lambda^k g~(F~^-(k+1) x).
    std::vector<Vector> terms;
    Vector z = invert_F((umask * x.array()).matrix());
    Eigen::ArrayXd pow_k = Eigen::ArrayXd::Ones(n);  // lambda^k
    double tail = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 0; k <= max_k; ++k) {
      const Eigen::ArrayXd ny = z.array().abs();
      const Eigen::ArrayXd denom = 1.0 - kh * ny.pow(alpha) / lam;
      const Eigen::ArrayXd q = (1.0 / lam) / denom;
      const Eigen::ArrayXd ratio = lam * q.pow(1.0 + alpha);
      const Eigen::ArrayXd t = kh * ny.pow(1.0 + alpha) * pow_k / (1.0 - ratio);
      const bool ok = ((umask == 0.0) || (denom > 0.0 && q < 1.0 && ratio < 1.0)).all();
      if (ok) {
        tail = (umask * t).maxCoeff();
        if (tail <= budget) {
          converged = true;
          break;
        }
      }
      terms.push_back((umask * G_.f_tilde(z).array()).matrix());
      z = invert_F(z);
      pow_k *= lam;
    }
    if (!converged) fail(tail);
    Vector acc = Vector::Zero(n);
    for (int k = static_cast<int>(terms.size()) - 1; k >= 0; --k) acc = terms[k] + G_.apply_lambda(acc);
    parts.unstable = -(umask * acc.array()).matrix();
  }
  return parts;
}

ConjugacySolver::Parts ConjugacySolver::phi_koenigs(const Vector& x) const {
  const SpaceDesc& sp = G_.space();
  const int n = sp.dim;
  const double alpha = G_.base().alpha;
  const double kh = holder_bound_ / (1.0 + alpha);  // |f~(y)| <= kh |y|^(1+alpha)
  const double budget = opt_.series_tol / 2.0;
  const bool forward = S_.unstable_dim() == 0;
  const auto& weights = koenigs_weight_norms_;
  const int max_k = std::min<int>(opt_.max_terms, static_cast<int>(weights.size()) - 2);

  std::vector<Vector> terms;
  Vector y = x;
  if (!forward) y = invert_F(y);
  bool converged = false;
  double tail = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_k; ++k) {
    // y is the k-th orbit point fed to f~: F~^k x (forward) or F~^-(k+1) x (backward).
    const double ny = sp.norm_of(y);
    const double growth = kh * std::pow(ny, alpha);
    double q = 0.0, ratio = 0.0, w = 0.0;
    if (forward) {
      q = lambda_norm_ + growth;
      ratio = lambda_inv_norm_ * std::pow(q, 1.0 + alpha);
      w = weights[k + 1];
    } else {
      const double denom = 1.0 - lambda_inv_norm_ * growth;
      q = denom > 0.0 ? lambda_inv_norm_ / denom : std::numeric_limits<double>::infinity();
      ratio = lambda_norm_ * std::pow(q, 1.0 + alpha);
      w = weights[k];
    }
    if (q < 1.0 && ratio < 1.0) {
      tail = kh * std::pow(ny, 1.0 + alpha) * w / (1.0 - ratio);
      if (tail <= budget) {
        converged = true;
        break;
      }
    }
    terms.push_back(G_.f_tilde(y));
    y = forward ? G_.eval_F(y) : invert_F(y);
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "phi: Koenigs series did not reach series_tol within " << max_k << " terms";
    throw NumericalError(msg.str(), tail);
  }

  Vector acc = Vector::Zero(n);
  if (forward) {
    // sum_k Lambda^-(k+1) f~(F~^k x)
    for (int k = static_cast<int>(terms.size()) - 1; k >= 0; --k) acc = apply_lambda_inv(terms[k] + acc);
    return {acc, Vector::Zero(n)};
  }
  // -sum_k Lambda^k f~(F~^-(k+1) x)
  for (int k = static_cast<int>(terms.size()) - 1; k >= 0; --k) acc = terms[k] + G_.apply_lambda(acc);
  return {Vector::Zero(n), -acc};
}

ConjugacySolver::Parts ConjugacySolver::phi_parts(const Vector& x) const {
  G_.space().check_point(x, "phi");
  if (realization_ == Realization::koenigs) {
    const bool one_sided = S_.stable_dim() == 0 || S_.unstable_dim() == 0;
    return one_sided ? phi_koenigs(x) : phi_koenigs_decoupled(x);
  }
  return diag_ ? phi_bounded_diagonal(x) : phi_bounded(x);
}

Vector ConjugacySolver::phi(const Vector& x) const {
  Parts p = phi_parts(x);
  return p.stable + p.unstable;
}

Vector ConjugacySolver::phi_inverse(const Vector& y) const {
  // Psi(y) = y + psi(y) with psi(y) = -phi(Psi(y)): the split series for psi are the phi
  // series evaluated along the orbit of Psi(y), so Psi(y) is the fixed point of z = y - phi(z).
  const SpaceDesc& sp = G_.space();
  sp.check_point(y, "phi_inverse");
  const double target = std::max(opt_.inversion_tol * std::max(1.0, sp.norm_of(y)), opt_.series_tol);
  Vector z = y;
  double step = 0.0;
  for (int it = 0; it < opt_.inversion_max_iters; ++it) {
    Vector next = y - phi(z);
    step = sp.norm_of(next - z);
    z = std::move(next);
    if (step <= target) return z;
  }
  std::ostringstream msg;
  msg << "phi_inverse: fixed-point iteration stalled (last step " << step << ")";
  throw NumericalError(msg.str(), step);
}

double ConjugacySolver::residual(const Vector& x) const {
  const Vector lhs = Phi(F(x));
  const Vector rhs = G_.apply_lambda(Phi(x));
  return G_.space().norm_of(lhs - rhs);
}

Vector invert_F(const ConjugacySolver& solver, const Vector& y) { return solver.invert_F(y); }
Vector phi(const ConjugacySolver& solver, const Vector& x) { return solver.phi(x); }
Vector phi_inverse(const ConjugacySolver& solver, const Vector& y) { return solver.phi_inverse(y); }
double residual(const ConjugacySolver& solver, const Vector& x) { return solver.residual(x); }

}  // namespace blidkit
