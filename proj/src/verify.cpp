#include "blidkit/verify.hpp"

#include "blidkit/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace blidkit {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::ordered_json inequality_json(const InequalityCheck& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["empirical"] = number_or_null(c.empirical);
  j["bound"] = number_or_null(c.bound);
  j["pass"] = c.pass;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string to_string(FitTarget t) { return t == FitTarget::phi ? "phi" : "phi_inverse"; }

int BetaFit::used_count() const {
  int n = 0;
  for (bool u : used) n += u ? 1 : 0;
  return n;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw UsageError("log_spaced: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

BetaFit fit_beta(const ConjugacySolver& solver, const std::vector<double>& radii,
                 int directions_per_radius, FitTarget target, double beta_target,
                 std::uint64_t seed, const std::string& scenario_id) {
  if (directions_per_radius < 8) throw UsageError("fit_beta: need at least 8 directions per radius");
  if (radii.size() < 2) throw UsageError("fit_beta: need at least two radii");
  const double limit = solver.map().identity_radius();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw UsageError("fit_beta: radii must be positive and strictly increasing");
    }
    if (!(radii[i] < limit)) {
      throw UsageError("fit_beta: radius " + fmt_double(radii[i]) +
                       " leaves the identity region of the cutoff (radius " + fmt_double(limit) + ")");
    }
  }

  const SpaceDesc& sp = solver.space();
  PointSampler sampler(sp, seed);
  std::vector<Vector> dirs;
  for (int d = 0; d < directions_per_radius; ++d) dirs.push_back(sampler.unit_direction());

  BetaFit fit;
  fit.scenario_id = scenario_id;
  fit.target = target;
  fit.radii = radii;
  fit.beta_target = beta_target;
  fit.series_tol = solver.options().series_tol;
  fit.noise_floor = 100.0 * fit.series_tol;
  fit.seed = seed;
  fit.directions = directions_per_radius;

  for (double r : radii) {
    double dev = 0.0;
    for (const Vector& u : dirs) {
      const Vector x = r * u;
      const Vector d = target == FitTarget::phi ? solver.phi(x) : Vector(solver.phi_inverse(x) - x);
      dev = std::max(dev, sp.norm_of(d));
    }
    fit.sup_deviation.push_back(dev);
    fit.used.push_back(dev > fit.noise_floor);
  }

  const int n = fit.used_count();
  if (n < 2) {
    throw DegenerateFitError("fit_beta: fewer than two radii above the noise floor " +
                             fmt_double(fit.noise_floor));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!fit.used[i]) continue;
    mx += std::log(radii[i]);
    my += std::log(fit.sup_deviation[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!fit.used[i]) continue;
    const double dx = std::log(radii[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(fit.sup_deviation[i]) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!fit.used[i]) continue;
      const double e = std::log(fit.sup_deviation[i]) - (fit.intercept + fit.slope * std::log(radii[i]));
      ssr += e * e;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2) / sxx);
  }
  fit.beta_empirical = fit.slope - 1.0;
  return fit;
}

std::string fits_csv(const std::vector<BetaFit>& fits) {
  std::ostringstream out;
  out << "scenario_id,target,radius,sup_deviation\n";
  for (const auto& f : fits) {
    for (std::size_t i = 0; i < f.radii.size(); ++i) {
      out << f.scenario_id << ',' << to_string(f.target) << ',' << fmt_double(f.radii[i]) << ','
          << fmt_double(f.sup_deviation[i]) << '\n';
    }
  }
  return out.str();
}

std::string summary_json(const std::vector<BetaFit>& fits, const std::vector<SummaryCheck>& checks) {
  nlohmann::ordered_json doc;
  doc["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    nlohmann::ordered_json j;
    j["scenario_id"] = f.scenario_id;
    j["target"] = to_string(f.target);
    j["slope"] = number_or_null(f.slope);
    j["slope_stderr"] = number_or_null(f.slope_stderr);
    j["beta_empirical"] = number_or_null(f.beta_empirical);
    j["beta_target"] = number_or_null(f.beta_target);
    j["pass"] = f.pass();
    j["seed"] = f.seed;
    j["series_tol"] = f.series_tol;
    j["noise_floor"] = f.noise_floor;
    j["radii_used"] = f.used_count();
    j["directions"] = f.directions;
    doc["fits"].push_back(std::move(j));
  }
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["scenario_id"] = c.scenario_id;
    j["smallness"] = inequality_json(c.report.smallness);
    j["holder"] = inequality_json(c.report.holder);
    j["m"] = number_or_null(c.report.m);
    j["local_sup_df"] = c.report.local.sup_df;
    j["local_sup_holder_quotient"] = c.report.local.sup_holder_quotient;
    j["local_data_ok"] = c.report.local.smallness_ok && c.report.local.holder_ok;
    j["samples"] = c.report.samples;
    j["seed"] = c.report.seed;
    j["tolerance_rel"] = kInequalityRelTol;
    j["pass"] = c.report.pass();
    doc["checks"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void emit_report(const std::vector<BetaFit>& fits, const std::vector<SummaryCheck>& checks,
                 const std::string& base_path) {
  write_file(base_path + ".csv", fits_csv(fits));
  write_file(base_path + ".json", summary_json(fits, checks));
}

}  // namespace blidkit
