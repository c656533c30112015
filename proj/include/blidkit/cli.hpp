#pragma once

#include "blidkit/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace blidkit::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kPass = 0;
inline constexpr int kViolation = 1;
inline constexpr int kConfigError = 2;

struct RunOptions {
  std::string out_dir = ".";
  bool quiet = false;
  std::string points_path;  ///< linearize: CSV of points, one per line
  int sample_points = 100;  ///< linearize: random points in the identity ball
};

int cmd_check_blid(const Scenario& s, const RunOptions& opt, std::ostream& out);
int cmd_cutoff_verify(const Scenario& s, const RunOptions& opt, std::ostream& out);
int cmd_linearize(const Scenario& s, const RunOptions& opt, std::ostream& out);
int cmd_fit_beta(const Scenario& s, const RunOptions& opt, std::ostream& out);
int cmd_spectral(const Scenario& s, const RunOptions& opt, std::ostream& out);

/// Parses argv, loads the scenario and dispatches. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blidkit::cli
