#pragma once

#include "blidkit/conjugacy.hpp"
#include "blidkit/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline blidkit::ConjugacySolver solver_for(const blidkit::Scenario& s) {
  return blidkit::ConjugacySolver(s.globalized(), blidkit::split(s.lambda, s.hyperbolicity_tol),
                                  s.solver);
}

inline blidkit::ConjugacySolver builtin_solver(const std::string& id) {
  return solver_for(blidkit::builtin_scenario(id));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("blidkit_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Builtin JSON with one top-level field replaced.
template <class T>
std::string patched_builtin(const std::string& id, const std::string& key, const T& value) {
  auto j = nlohmann::json::parse(blidkit::builtin_json(id));
  j[key] = value;
  return j.dump();
}

// Random real matrix V D V^-1 with a prescribed hyperbolic spectrum, including rotation blocks.
inline blidkit::Matrix random_hyperbolic(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  blidkit::Matrix d = blidkit::Matrix::Zero(n, n);
  int i = 0;
  while (i < n) {
    const double mod = u(rng) < 0.5 ? 0.2 + 0.6 * u(rng) : 1.25 + 1.75 * u(rng);
    if (i + 1 < n && u(rng) < 0.3) {
      const double th = 3.0 * u(rng) + 0.1;
      d(i, i) = mod * std::cos(th);
      d(i, i + 1) = -mod * std::sin(th);
      d(i + 1, i) = mod * std::sin(th);
      d(i + 1, i + 1) = mod * std::cos(th);
      i += 2;
    } else {
      d(i, i) = u(rng) < 0.5 ? mod : -mod;
      i += 1;
    }
  }
  blidkit::Matrix v = blidkit::Matrix::Identity(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) v(r, c) += 0.3 * g(rng);
  return v * d * v.inverse();
}

}  // namespace testing
