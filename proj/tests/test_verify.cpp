#include "blidkit/errors.hpp"
#include "blidkit/verify.hpp"

#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

using namespace blidkit;
using testing::builtin_solver;

namespace {

// Ordinary least squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("log_spaced") {
  const auto r = log_spaced(1e-6, 1e-2, 24);
  CHECK(r.size() == 24);
  CHECK(r.front() == 1e-6);
  CHECK(r.back() == 1e-2);
  CHECK(std::is_sorted(r.begin(), r.end()));
  CHECK(std::adjacent_find(r.begin(), r.end()) == r.end());
  CHECK(r[12] / r[11] == doctest::Approx(r[1] / r[0]));
  CHECK_THROWS_AS(log_spaced(1.0, 0.5, 3), UsageError);
}

TEST_CASE("koenigs-1d slope on oracle values, then through fit_beta") {
  const ConjugacySolver solver = builtin_solver("koenigs-1d");
  // Oracle deviations from the Koenigs iteration, same radii that clear the noise floor.
  const auto F = [&](double t) { return solver.F(Vector::Constant(1, t))(0); };
  std::vector<double> radii, dev;
  for (double r : log_spaced(1e-3, 1e-1 * 0.99, 12)) {
    double y = r, scale = 1.0;
    for (int k = 0; k < 80; ++k) {
      y = F(y);
      scale *= 2.0;
    }
    radii.push_back(r);
    dev.push_back(std::abs(y * scale - r));
  }
  const double oracle_slope = loglog_slope(radii, dev);
  CHECK(oracle_slope == doctest::Approx(2.0).epsilon(0.05));

  const BetaFit fit = fit_beta(solver, log_spaced(1e-6, 1e-2, 24), 8, FitTarget::phi, 1.0, 1, "k");
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(fit.slope - oracle_slope) < 0.05);
  CHECK(fit.pass());
  CHECK(fit.beta_empirical == doctest::Approx(fit.slope - 1.0));
  CHECK(fit.noise_floor == doctest::Approx(100 * 1e-10));
  for (std::size_t i = 0; i < fit.radii.size(); ++i) {
    CHECK(fit.used[i] == (fit.sup_deviation[i] > fit.noise_floor));
    CHECK(fit.sup_deviation[i] >= 0.0);
  }

  const BetaFit inv = fit_beta(solver, log_spaced(1e-6, 1e-2, 24), 8, FitTarget::phi_inverse, 1.0, 1);
  CHECK(inv.slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(inv.slope - fit.slope) < 0.15);
}

TEST_CASE("monotone envelope: sup_deviation / r^2 stays between positive constants") {
  const ConjugacySolver solver = builtin_solver("koenigs-1d");
  const BetaFit fit = fit_beta(solver, log_spaced(1e-6, 1e-2, 24), 8, FitTarget::phi, 1.0, 2);
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < fit.radii.size(); ++i) {
    if (!fit.used[i]) continue;
    const double q = fit.sup_deviation[i] / (fit.radii[i] * fit.radii[i]);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 1.5);
  // Phi(x) = x + a x^2 + ... with a (lambda - lambda^2) = 0.1, so a = 0.4.
  CHECK(lo == doctest::Approx(0.4).epsilon(0.05));
}

TEST_CASE("saddle slope clears the spectral prediction and is direction robust") {
  const Scenario s = builtin_scenario("saddle-2d");
  const ConjugacySolver solver = testing::solver_for(s);
  const double beta = *band_width_check(solver.splitting(), s.alpha).beta_predicted;
  const auto radii = log_spaced(1e-6, 1e-2, 24);
  const BetaFit f16 = fit_beta(solver, radii, 16, FitTarget::phi, beta, 3);
  const BetaFit f32 = fit_beta(solver, radii, 32, FitTarget::phi, beta, 3);
  CHECK(f16.slope >= 1.0 + beta - 0.1);
  CHECK(f16.pass());
  CHECK(std::abs(f16.slope - f32.slope) < std::max(f16.slope_stderr, f32.slope_stderr) + 0.02);
  const BetaFit inv = fit_beta(solver, radii, 16, FitTarget::phi_inverse, beta, 3);
  CHECK(std::abs(inv.slope - f16.slope) < 0.15);
}

TEST_CASE("degenerate and invalid fits") {
  const ConjugacySolver zero = builtin_solver("c01-blid-eps2");
  CHECK_THROWS_AS(fit_beta(zero, log_spaced(1e-6, 1e-2, 8), 8, FitTarget::phi, 1.0, 1),
                  DegenerateFitError);
  const ConjugacySolver k = builtin_solver("koenigs-1d");
  CHECK_THROWS_AS(fit_beta(k, log_spaced(1e-6, 1e-2, 8), 7, FitTarget::phi, 1.0, 1), UsageError);
  CHECK_THROWS_AS(fit_beta(k, {1e-3, 1e-4}, 8, FitTarget::phi, 1.0, 1), UsageError);
  CHECK_THROWS_AS(fit_beta(k, {1e-3, 0.5}, 8, FitTarget::phi, 1.0, 1), UsageError);
}

TEST_CASE("report files: headers, row counts, schema and byte stability") {
  CHECK(fits_csv({}) == "scenario_id,target,radius,sup_deviation\n");
  const auto empty = nlohmann::json::parse(summary_json({}, {}));
  CHECK(empty["fits"].empty());
  CHECK(empty["checks"].empty());

  const ConjugacySolver k = builtin_solver("koenigs-1d");
  const auto radii = log_spaced(1e-6, 1e-2, 24);
  const BetaFit a = fit_beta(k, radii, 8, FitTarget::phi, 1.0, 11, "koenigs-1d");
  const BetaFit b = fit_beta(k, radii, 8, FitTarget::phi, 1.0, 11, "koenigs-1d");
  const std::string csv = fits_csv({a});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);
  CHECK(csv == fits_csv({b}));
  CHECK(summary_json({a}, {}) == summary_json({b}, {}));

  const auto j = nlohmann::json::parse(summary_json({a}, {}));
  for (const char* key : {"scenario_id", "target", "slope", "slope_stderr", "beta_empirical",
                          "beta_target", "pass", "seed", "series_tol"}) {
    CHECK_MESSAGE(j["fits"][0].contains(key), key);
  }

  const auto dir = testing::scratch_dir("verify");
  emit_report({a}, {}, (dir / "r1").string());
  emit_report({b}, {}, (dir / "r2").string());
  CHECK(testing::slurp(dir / "r1.csv") == testing::slurp(dir / "r2.csv"));
  CHECK(testing::slurp(dir / "r1.json") == testing::slurp(dir / "r2.json"));
  CHECK(testing::slurp(dir / "r1.csv") == csv);
  CHECK_THROWS_AS(emit_report({a}, {}, (dir / "missing" / "deeper" / "r").string()), IoError);
}

}
