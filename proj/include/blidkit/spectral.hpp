#pragma once

#include "blidkit/space.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace blidkit {

/// Closed annulus {lo <= |z| <= hi} holding one side of the spectrum.
struct Annulus {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * Stable/unstable splitting of a hyperbolic matrix.
 *
 * The stable subspace is spanned by `stable_basis` (n x k) with Lambda restricted to it
 * given by `lambda_s` (k x k); likewise for the unstable side. Projections are oblique
 * along the complementary invariant subspace.
 */
struct HyperbolicSplitting {
  Matrix lambda;
  Matrix p_s;
  Matrix p_u;
  Matrix stable_basis;     ///< n x k, P_s = stable_basis * stable_coords
  Matrix unstable_basis;   ///< n x (n-k), P_u = unstable_basis * unstable_coords
  Matrix stable_coords;    ///< k x n
  Matrix unstable_coords;  ///< (n-k) x n
  Matrix lambda_s;
  Matrix lambda_u;
  std::optional<Annulus> stable;    ///< [a, b] subset of (0, 1)
  std::optional<Annulus> unstable;  ///< [c, d] subset of (1, inf)
  double gap = 0.0;                 ///< min over eigenvalues of | |lambda| - 1 |
  std::vector<std::complex<double>> eigenvalues;  ///< stable block first

  int stable_dim() const { return static_cast<int>(lambda_s.rows()); }
  int unstable_dim() const { return static_cast<int>(lambda_u.rows()); }
};

/// Ordered real Schur form with the eigenvalues inside the unit circle leading, followed by
/// a Sylvester solve that decouples the two diagonal blocks.
/// Throws InvalidInput (ConfigError) for singular Lambda and NonHyperbolicError when an
/// eigenvalue modulus is within `tol` of 1.
HyperbolicSplitting split(const Matrix& lambda, double tol = 1e-6);

struct BandWidthReport {
  double alpha = 1.0;
  std::optional<double> beta_predicted;
  std::string predicate_name;
  bool satisfied = false;
  double stable_ratio_term = 0.0;    ///< ln(a)/ln(b) - 1, +inf when a == b or no stable part
  double unstable_ratio_term = 0.0;  ///< ln(d)/ln(c) - 1, +inf when c == d or no unstable part
};

/// Names accepted by band_width_check.
std::vector<std::string> band_width_predicates();

BandWidthReport band_width_check(const HyperbolicSplitting& s, double alpha,
                                 const std::string& predicate = "gap_ratio");

struct AdaptedNorms {
  double rho_s = 0.0;  ///< |Lambda_s^k|^(1/k), 0 for an empty stable side
  double rho_u = 0.0;  ///< |Lambda_u^-k|^(1/k), 0 for an empty unstable side
};

/// Norms are taken for Lambda^k P_s and Lambda^-k P_u acting on the whole space, in `norm`.
AdaptedNorms adapted_operator_norms(const HyperbolicSplitting& s, int k,
                                    NormKind norm = NormKind::euclidean);

}  // namespace blidkit
