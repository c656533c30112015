#pragma once

#include "blidkit/conjugacy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blidkit {

struct FitSettings {
  double radius_min = 1e-6;
  double radius_max = 1e-2;
  int radius_count = 24;
  int directions = 8;
  std::optional<double> beta_target;  ///< defaults to the spectral prediction
};

/// A complete, validated experiment description. Parsing is all-or-nothing.
struct Scenario {
  std::string id;
  SpaceDesc space;
  Matrix lambda;
  NonlinearPart f = NonlinearPart::zero(SpaceDesc{});
  double r1 = 1.0;
  double r2 = 2.0;
  BlidVariant variant = BlidVariant::radial;
  std::optional<double> declared_c0;
  std::optional<double> declared_c1;
  std::optional<double> delta;
  double alpha = 1.0;
  double holder_constant = 0.0;
  double smallness = 0.0;
  double domain_radius = 1.0;
  double hyperbolicity_tol = 1e-6;
  SolverOptions solver;
  std::uint64_t seed = 0;
  int samples = 1000;
  FitSettings fit;
  std::string band_predicate = "gap_ratio";

  BumpFunction bump() const { return make_bump(r1, r2); }
  BlidMap blid() const;
  MapSpec map_spec() const;
  /// Globalized map with m estimated from `samples` seeded draws.
  GlobalizedMap globalized() const;
  double effective_delta() const;
};

/// Throws ConfigError naming the offending line (syntax) or field path (contents).
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

std::vector<std::string> builtin_ids();
/// JSON text of a builtin scenario; throws ConfigError for an unknown id.
std::string builtin_json(const std::string& id);
Scenario builtin_scenario(const std::string& id);

}  // namespace blidkit
