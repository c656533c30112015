#pragma once

#include "blidkit/blid.hpp"
#include "blidkit/polynomial.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace blidkit {

/// F = Lambda + f with the local Holder data declared for Df on a ball.
struct MapSpec {
  SpaceDesc space;
  Matrix lambda;
  NonlinearPart f;
  double alpha = 1.0;          ///< Holder exponent of Df at 0, in (0, 1]
  double domain_radius = 1.0;  ///< ball on which the constants below are declared
  double holder_constant = 0.0;  ///< M: |Df(x)| <= M |x|^alpha on the ball
  double smallness = 0.0;        ///< delta_eta: |Df(x)| <= delta_eta on the ball

  /// Structural checks: sizes, alpha range, radii, f(0) = 0 and Df(0) = 0.
  void validate() const;
};

/// Outcome of sampling the declared constants of a MapSpec on its ball.
struct LocalDataCheck {
  double sup_df = 0.0;
  double sup_holder_quotient = 0.0;
  bool smallness_ok = false;
  bool holder_ok = false;
  int samples = 0;
};

LocalDataCheck check_local_data(const MapSpec& spec, int samples, std::uint64_t seed);

/**
 * f~(x) = f(delta H(x / delta)): equal to f on |x| < delta * delta0 and evaluated only
 * inside the ball of radius delta * c0.
 */
class GlobalizedMap {
 public:
  GlobalizedMap(MapSpec base, BlidMap blid, double delta);

  const MapSpec& base() const { return base_; }
  const BlidMap& blid() const { return blid_; }
  double delta() const { return delta_; }
  const SpaceDesc& space() const { return base_.space; }

  /// delta H(x / delta)
  Vector localize(const Vector& x) const;
  Vector f_tilde(const Vector& x) const;
  /// Df~(x) v = Df(delta H(x/delta)) DH(x/delta) v
  Vector df_tilde(const Vector& x, const Vector& v) const;
  /// |Df~(x)| in the induced operator norm.
  double df_tilde_norm(const Vector& x) const;
  /// Lambda x + f~(x)
  Vector eval_F(const Vector& x) const;
  Vector apply_lambda(const Vector& x) const;

  /// Radius of the ball on which f~ = f.
  double identity_radius() const { return delta_ * blid_.identity_radius(); }
  /// Upper bound on sup |f~| over the whole space.
  double sup_f_tilde_bound() const;
  /// Declared global Lipschitz bound of f~: delta_eta * c1.
  double lipschitz_bound() const { return base_.smallness * blid_.c1(); }

  double m() const { return m_.value; }
  const SampledSup& m_estimate() const { return m_; }
  void set_m(SampledSup m) { m_ = m; }

 private:
  MapSpec base_;
  BlidMap blid_;
  double delta_;
  std::optional<Vector> lambda_diag_;
  SampledSup m_{1.0, 0, 0};
};

/// Default cutoff scale: delta * c0 = domain_radius / 2.
double default_delta(const MapSpec& base, const BlidMap& H);

/// Builds the globalized map; throws ConfigError when delta * c0 > domain_radius.
GlobalizedMap globalize(const MapSpec& base, const BlidMap& H, double delta);

/// Two-branch bookkeeping for m = sup |delta H(x/delta)| / |x|.
struct MEstimate {
  SampledSup sup;
  double small_branch_max = 0.0;  ///< max ratio with |x/delta| < eps'
  double large_branch_max = 0.0;  ///< max ratio with |x/delta| >= eps'
  double threshold = 0.0;         ///< eps' (identity radius of H)
  double bound = 0.0;             ///< max(c1 + margin, c0 / eps')
  bool identity_region_seen = false;  ///< some sampled ratio was exactly 1
  bool far_field_ok = false;          ///< every far ratio <= c0 delta / |x|
  bool within_bound = false;
};

/// Samples radii log-uniformly over [1e-8 delta, 1e4 delta]; stores m in G.
MEstimate estimate_m(GlobalizedMap& G, int samples, std::uint64_t seed);

struct InequalityCheck {
  std::string name;
  double empirical = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Condition76Report {
  InequalityCheck smallness;  ///< sup |Df~| <= delta_eta * c1
  InequalityCheck holder;     ///< sup |Df~(x)| / |x|^alpha <= M c1 m^alpha
  LocalDataCheck local;       ///< precondition sampled on the declared ball
  double m = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  bool pass() const { return smallness.pass && holder.pass; }
};

/// Relative tolerance for the pass/fail comparisons.
inline constexpr double kInequalityRelTol = 1e-9;

Condition76Report check_condition_76(const GlobalizedMap& G, int samples, std::uint64_t seed);

Vector eval_globalized_F(const GlobalizedMap& G, const Vector& x);

}  // namespace blidkit
