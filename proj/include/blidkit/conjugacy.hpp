#pragma once

#include "blidkit/cutoff.hpp"
#include "blidkit/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace blidkit {

/**
 * How phi is realized.
 *
 * bounded: phi = phi_u + phi_s with
 *            phi_u(x) =  sum_k P_u Lambda^-(k+1) f~(F~^k x)
 *            phi_s(x) = -sum_k P_s Lambda^k     f~(F~^-(k+1) x),
 *          the unique bounded solution of Lambda phi = phi o F~ + f~.
 * koenigs: for a one-sided spectrum, the Koenigs limit lim Lambda^-n F~^n (all stable)
 *          or lim Lambda^n F~^-n (all unstable), written as the same telescoped series
 *          along the contracting orbit. This is the conjugacy tangent to the identity.
 *          A decoupled system (diagonal Lambda, coordinatewise f and pointwise blid) is a
 *          product of 1D maps and gets the Koenigs limit coordinate by coordinate.
 * automatic: koenigs when one side of the spectrum is empty or the system is decoupled,
 *            bounded otherwise.
 */
enum class Realization { automatic, bounded, koenigs };

std::string to_string(Realization r);

struct SolverOptions {
  double series_tol = 1e-10;
  int max_terms = 2000;
  double inversion_tol = 1e-14;
  int inversion_max_iters = 500;
  Realization realization = Realization::automatic;
};

class ConjugacySolver {
 public:
  /// Throws ConfigError when the contraction budget Lip(f~) |Lambda^-1| < 1 fails, and
  /// NumericalError when the bounded-series tail cannot reach series_tol within max_terms.
  ConjugacySolver(GlobalizedMap G, HyperbolicSplitting S, SolverOptions options = {});

  const GlobalizedMap& map() const { return G_; }
  const HyperbolicSplitting& splitting() const { return S_; }
  const SolverOptions& options() const { return opt_; }
  Realization realization() const { return realization_; }
  /// Diagonal Lambda, coordinatewise f and pointwise blid: F~ acts coordinate by coordinate.
  bool decoupled() const { return decoupled_; }
  const SpaceDesc& space() const { return G_.space(); }

  Vector F(const Vector& x) const { return G_.eval_F(x); }
  /// x with |F~(x) - y| <= inversion_tol * max(1, |y|), via x <- Lambda^-1 (y - f~(x)).
  Vector invert_F(const Vector& y) const;
  Vector phi(const Vector& x) const;
  /// phi split into its stable and unstable projections (they sum to phi).
  struct Parts {
    Vector stable;
    Vector unstable;
  };
  Parts phi_parts(const Vector& x) const;
  /// Phi(x) = x + phi(x)
  Vector Phi(const Vector& x) const { return x + phi(x); }
  /// Psi = Phi^-1, i.e. Psi o Lambda = F~ o Psi.
  Vector phi_inverse(const Vector& y) const;
  /// |Phi(F~(x)) - Lambda Phi(x)|
  double residual(const Vector& x) const;

  /// Series lengths fixed at construction (bounded realization).
  int stable_terms() const { return terms_s_; }
  int unstable_terms() const { return terms_u_; }
  /// sup|f~| times the summed operator-norm weights; bounds sup|phi| (bounded realization).
  double phi_sup_bound() const { return phi_sup_bound_; }
  /// Lip(f~) |Lambda^-1|, required < 1.
  double contraction_factor() const { return contraction_; }

 private:
  Parts phi_bounded(const Vector& x) const;
  Parts phi_koenigs(const Vector& x) const;
  Parts phi_bounded_diagonal(const Vector& x) const;
  Parts phi_koenigs_decoupled(const Vector& x) const;
  Vector apply_lambda_inv(const Vector& x) const;

  GlobalizedMap G_;
  HyperbolicSplitting S_;
  SolverOptions opt_;
  Realization realization_;
  Matrix lambda_inv_;                // empty when Lambda is diagonal
  std::optional<Vector> diag_;       // diagonal of Lambda, when it is diagonal
  Vector stable_mask_;               // 1 on stable coordinates (diagonal case)
  bool decoupled_ = false;
  double contraction_ = 0.0;
  double lambda_norm_ = 0.0;
  double lambda_inv_norm_ = 0.0;
  double holder_bound_ = 0.0;  // global bound on |Df~(x)| / |x|^alpha
  int terms_s_ = 0;
  int terms_u_ = 0;
  double phi_sup_bound_ = 0.0;
  std::vector<double> koenigs_weight_norms_;  // |A^j| for the Koenigs weight step A
};

Vector invert_F(const ConjugacySolver& solver, const Vector& y);
Vector phi(const ConjugacySolver& solver, const Vector& x);
Vector phi_inverse(const ConjugacySolver& solver, const Vector& y);
double residual(const ConjugacySolver& solver, const Vector& x);

}  // namespace blidkit
