#pragma once

#include "blidkit/conjugacy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace blidkit {

enum class FitTarget { phi, phi_inverse };

std::string to_string(FitTarget t);

/// Log-log least-squares fit of sup_dir |Phi(x) - x| against |x| = r.
struct BetaFit {
  std::string scenario_id;
  FitTarget target = FitTarget::phi;
  std::vector<double> radii;
  std::vector<double> sup_deviation;
  std::vector<bool> used;  ///< radius above the noise floor 100 * series_tol
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double beta_empirical = 0.0;
  double beta_target = 0.0;
  double noise_floor = 0.0;
  double series_tol = 0.0;
  std::uint64_t seed = 0;
  int directions = 0;

  /// O-claim confirmed: beta_empirical >= beta_target - slope_margin.
  bool pass() const { return beta_empirical >= beta_target - kSlopeMargin; }
  int used_count() const;

  static constexpr double kSlopeMargin = 0.1;
};

/// `count` radii log-spaced over [lo, hi], strictly increasing.
std::vector<double> log_spaced(double lo, double hi, int count);

/// Throws UsageError when directions < 8 or a radius leaves the identity region, and
/// DegenerateFitError when fewer than two radii clear the noise floor.
BetaFit fit_beta(const ConjugacySolver& solver, const std::vector<double>& radii,
                 int directions_per_radius, FitTarget target, double beta_target,
                 std::uint64_t seed, const std::string& scenario_id = "");

struct SummaryCheck {
  std::string scenario_id;
  Condition76Report report;
};

/// Writes `<base>.csv` (scenario_id,target,radius,sup_deviation) and `<base>.json`.
/// Output is byte-stable for identical inputs.
void emit_report(const std::vector<BetaFit>& fits, const std::vector<SummaryCheck>& checks,
                 const std::string& base_path);

/// The CSV text emit_report writes.
std::string fits_csv(const std::vector<BetaFit>& fits);
/// The JSON text emit_report writes.
std::string summary_json(const std::vector<BetaFit>& fits, const std::vector<SummaryCheck>& checks);

}  // namespace blidkit
