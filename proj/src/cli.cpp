#include "blidkit/cli.hpp"

#include "blidkit/errors.hpp"
#include "blidkit/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace blidkit::cli {
namespace {

using ojson = nlohmann::ordered_json;

// Residual suite thresholds for linearize.
constexpr double kResidualFactor = 10.0;
constexpr double kInverseTol = 1e-7;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string out_path(const RunOptions& opt, const std::string& name) {
  return (std::filesystem::path(opt.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

void write_json(const std::string& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

ConjugacySolver build_solver(const Scenario& s) {
  HyperbolicSplitting S = split(s.lambda, s.hyperbolicity_tol);
  return ConjugacySolver(s.globalized(), std::move(S), s.solver);
}

std::vector<Vector> read_points(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("points: cannot open '" + path + "'");
  std::vector<Vector> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("points: line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != dim) {
      throw ConfigError("points: line " + std::to_string(lineno) + ": expected " +
                        std::to_string(dim) + " values, got " + std::to_string(vals.size()));
    }
    pts.push_back(Eigen::Map<const Vector>(vals.data(), dim));
  }
  if (pts.empty()) throw ConfigError("points: '" + path + "' has no points");
  return pts;
}

}  // namespace

int cmd_check_blid(const Scenario& s, const RunOptions& opt, std::ostream& out) {
  const BlidMap H = s.blid();
  const SpaceDesc& sp = s.space;

  // Local identity: H(x) == x bit for bit strictly inside the identity ball.
  PointSampler sampler(sp, s.seed);
  int identity_failures = 0;
  for (int i = 0; i < s.samples; ++i) {
    const Vector x = sampler.in_ball(H.identity_radius());
    if (sp.norm_of(x) >= H.identity_radius()) continue;
    if (H.eval(x) != x) ++identity_failures;
  }
  const SampledSup c0 = estimate_c0(H, s.samples, s.seed + 1);
  const SampledSup c1 = estimate_c1(H, s.samples, s.seed + 2);
  const bool identity_ok = identity_failures == 0;
  // c0 is an exact algebraic bound; c1 carries the sampling tolerance on sup|h'|.
  const bool c0_ok = c0.value <= H.c0();
  const bool c1_ok = c1.value <= H.c1() + 1e-9;
  const bool pass = identity_ok && c0_ok && c1_ok;

  if (!opt.quiet) {
    out << "check-blid " << s.id << " (" << sp.describe() << ", "
        << (H.variant() == BlidVariant::radial ? "radial" : "pointwise") << ")\n";
    out << "  local identity  |x| < " << fmt(H.identity_radius()) << ": " << identity_failures
        << " mismatches over " << s.samples << " samples  " << verdict(identity_ok) << "\n";
    out << "  sup|H|   empirical " << fmt(c0.value) << " <= c0 " << fmt(H.c0()) << "  "
        << verdict(c0_ok) << "\n";
    out << "  sup|DH|  empirical " << fmt(c1.value) << " <= c1 " << fmt(H.c1()) << "  "
        << verdict(c1_ok) << "\n";
    out << "result: " << verdict(pass) << "\n";
  }

  ojson j;
  j["scenario_id"] = s.id;
  j["command"] = "check-blid";
  j["variant"] = H.variant() == BlidVariant::radial ? "radial" : "pointwise";
  j["seed"] = s.seed;
  j["samples"] = s.samples;
  j["identity_radius"] = H.identity_radius();
  j["identity_mismatches"] = identity_failures;
  j["c0"] = {{"empirical", num(c0.value)}, {"bound", H.c0()}, {"pass", c0_ok}};
  j["c1"] = {{"empirical", num(c1.value)}, {"bound", H.c1()}, {"pass", c1_ok}};
  j["pass"] = pass;
  write_json(out_path(opt, s.id + "_check_blid.json"), j);
  return pass ? kPass : kViolation;
}

int cmd_cutoff_verify(const Scenario& s, const RunOptions& opt, std::ostream& out) {
  GlobalizedMap G = globalize(s.map_spec(), s.blid(), s.effective_delta());
  const MEstimate me = estimate_m(G, s.samples, s.seed);
  const Condition76Report rep = check_condition_76(G, s.samples, s.seed + 1);
  const bool m_ok = me.within_bound && me.identity_region_seen && me.far_field_ok;
  const bool local_ok = rep.local.smallness_ok && rep.local.holder_ok;
  const bool pass = rep.pass() && m_ok && local_ok;

  if (!opt.quiet) {
    out << "cutoff-verify " << s.id << "  delta = " << fmt(G.delta())
        << "  identity radius = " << fmt(G.identity_radius()) << "\n";
    out << "  declared data on |x| <= " << fmt(s.domain_radius) << ": sup|Df| "
        << fmt(rep.local.sup_df) << " <= " << fmt(s.smallness) << " "
        << verdict(rep.local.smallness_ok) << ", sup|Df|/|x|^alpha "
        << fmt(rep.local.sup_holder_quotient) << " <= " << fmt(s.holder_constant) << " "
        << verdict(rep.local.holder_ok) << "\n";
    out << "  m = " << fmt(rep.m) << " (identity branch max " << fmt(me.small_branch_max)
        << ", far branch max " << fmt(me.large_branch_max) << ", bound " << fmt(me.bound)
        << ")  " << verdict(m_ok) << "\n";
    out << "  " << rep.smallness.name << ": " << fmt(rep.smallness.empirical) << " <= "
        << fmt(rep.smallness.bound) << "  " << verdict(rep.smallness.pass) << "\n";
    out << "  " << rep.holder.name << ": " << fmt(rep.holder.empirical) << " <= "
        << fmt(rep.holder.bound) << "  " << verdict(rep.holder.pass) << "\n";
    out << "result: " << verdict(pass) << "\n";
  }
  emit_report({}, {SummaryCheck{s.id, rep}}, out_path(opt, s.id + "_cutoff"));
  return pass ? kPass : kViolation;
}

int cmd_linearize(const Scenario& s, const RunOptions& opt, std::ostream& out) {
  const ConjugacySolver solver = build_solver(s);
  const SpaceDesc& sp = s.space;
  std::vector<Vector> pts;
  if (!opt.points_path.empty()) {
    pts = read_points(opt.points_path, sp.dim);
  } else {
    if (opt.sample_points < 1) throw UsageError("linearize: --sample must be >= 1");
    PointSampler sampler(sp, s.seed);
    for (int i = 0; i < opt.sample_points; ++i) {
      pts.push_back(sampler.in_ball(solver.map().identity_radius()));
    }
  }

  const double res_tol = kResidualFactor * s.solver.series_tol;
  std::ostringstream coords, summary;
  coords << "point,coordinate,x,Phi,Psi\n";
  summary << "point,norm_x,deviation,residual,inverse_error\n";
  double worst_res = 0.0, worst_inv = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector& x = pts[i];
    const Vector Phi = solver.Phi(x);
    const Vector Psi = solver.phi_inverse(x);
    const double res = solver.residual(x);
    const double inv = sp.norm_of(solver.Phi(Psi) - x);
    worst_res = std::max(worst_res, res);
    worst_inv = std::max(worst_inv, inv);
    for (int c = 0; c < sp.dim; ++c) {
      coords << i << ',' << c << ',' << fmt17(x(c)) << ',' << fmt17(Phi(c)) << ','
             << fmt17(Psi(c)) << '\n';
    }
    summary << i << ',' << fmt17(sp.norm_of(x)) << ',' << fmt17(sp.norm_of(Phi - x)) << ','
            << fmt17(res) << ',' << fmt17(inv) << '\n';
  }
  const bool res_ok = worst_res <= res_tol;
  const bool inv_ok = worst_inv <= kInverseTol;
  const bool pass = res_ok && inv_ok;
  write_text(out_path(opt, s.id + "_linearize.csv"), coords.str());
  write_text(out_path(opt, s.id + "_linearize_residuals.csv"), summary.str());

  if (!opt.quiet) {
    out << "linearize " << s.id << "  realization = " << to_string(solver.realization())
        << "  points = " << pts.size() << "\n";
    out << "  sup |Phi(F~(x)) - Lambda Phi(x)| = " << fmt(worst_res) << " <= " << fmt(res_tol)
        << "  " << verdict(res_ok) << "\n";
    out << "  sup |Phi(Psi(y)) - y|          = " << fmt(worst_inv) << " <= " << fmt(kInverseTol)
        << "  " << verdict(inv_ok) << "\n";
    out << "result: " << verdict(pass) << "\n";
  }
  return pass ? kPass : kViolation;
}

int cmd_fit_beta(const Scenario& s, const RunOptions& opt, std::ostream& out) {
  const ConjugacySolver solver = build_solver(s);
  double beta_target = 0.0;
  if (s.fit.beta_target) {
    beta_target = *s.fit.beta_target;
  } else {
    const BandWidthReport band = band_width_check(solver.splitting(), s.alpha, s.band_predicate);
    if (!band.beta_predicted) {
      throw ConfigError("fit-beta: predicate '" + s.band_predicate +
                        "' gives no beta; declare fit.beta_target");
    }
    beta_target = *band.beta_predicted;
  }
  const auto radii = log_spaced(s.fit.radius_min, s.fit.radius_max, s.fit.radius_count);
  std::vector<BetaFit> fits;
  bool pass = true;
  for (FitTarget t : {FitTarget::phi, FitTarget::phi_inverse}) {
    try {
      fits.push_back(fit_beta(solver, radii, s.fit.directions, t, beta_target, s.seed, s.id));
      pass = pass && fits.back().pass();
    } catch (const DegenerateFitError& e) {
      if (!opt.quiet) out << "  " << to_string(t) << ": degenerate fit: " << e.what() << "\n";
      pass = false;
    }
  }
  emit_report(fits, {}, out_path(opt, s.id + "_fit"));
  if (!opt.quiet) {
    out << "fit-beta " << s.id << "  realization = " << to_string(solver.realization())
        << "  beta_target = " << fmt(beta_target) << "\n";
    for (const BetaFit& f : fits) {
      out << "  " << to_string(f.target) << ": slope " << fmt(f.slope) << " +- "
          << fmt(f.slope_stderr) << " over " << f.used_count() << "/" << f.radii.size()
          << " radii, beta_empirical " << fmt(f.beta_empirical) << " >= "
          << fmt(f.beta_target - BetaFit::kSlopeMargin) << "  " << verdict(f.pass()) << "\n";
    }
    out << "result: " << verdict(pass) << "\n";
  }
  return pass ? kPass : kViolation;
}

int cmd_spectral(const Scenario& s, const RunOptions& opt, std::ostream& out) {
  const HyperbolicSplitting S = split(s.lambda, s.hyperbolicity_tol);
  const BandWidthReport band = band_width_check(S, s.alpha, s.band_predicate);
  const AdaptedNorms rho = adapted_operator_norms(S, 64, s.space.norm);

  auto annulus_json = [](const std::optional<Annulus>& a) -> ojson {
    if (!a) return nullptr;
    return ojson{{"lo", a->lo}, {"hi", a->hi}};
  };
  ojson j;
  j["scenario_id"] = s.id;
  j["command"] = "spectral";
  j["dim"] = s.space.dim;
  j["stable_dim"] = S.stable_dim();
  j["unstable_dim"] = S.unstable_dim();
  j["gap"] = S.gap;
  j["stable_annulus"] = annulus_json(S.stable);
  j["unstable_annulus"] = annulus_json(S.unstable);
  j["rho_s"] = rho.rho_s;
  j["rho_u"] = rho.rho_u;
  j["alpha"] = band.alpha;
  j["predicate"] = band.predicate_name;
  j["stable_ratio_term"] = num(band.stable_ratio_term);
  j["unstable_ratio_term"] = num(band.unstable_ratio_term);
  j["beta_predicted"] = band.beta_predicted ? ojson(*band.beta_predicted) : ojson(nullptr);
  j["pass"] = band.satisfied;
  write_json(out_path(opt, s.id + "_spectral.json"), j);

  if (!opt.quiet) {
    auto ann = [](const std::optional<Annulus>& a) {
      return a ? "[" + fmt(a->lo) + ", " + fmt(a->hi) + "]" : std::string("empty");
    };
    out << "spectral " << s.id << "  hyperbolic, gap = " << fmt(S.gap) << "\n";
    out << "  stable   dim " << S.stable_dim() << "  |z| in " << ann(S.stable)
        << "  adapted rho_s = " << fmt(rho.rho_s) << "\n";
    out << "  unstable dim " << S.unstable_dim() << "  |z| in " << ann(S.unstable)
        << "  adapted rho_u = " << fmt(rho.rho_u) << "\n";
    out << "  predicate " << band.predicate_name << ": stable ratio term "
        << fmt(band.stable_ratio_term) << ", unstable ratio term "
        << fmt(band.unstable_ratio_term) << "\n";
    out << "  beta_predicted = " << (band.beta_predicted ? fmt(*band.beta_predicted) : "none")
        << " (alpha = " << fmt(band.alpha) << ")\n";
    out << "result: " << verdict(band.satisfied) << "\n";
  }
  return band.satisfied ? kPass : kViolation;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local linearization near hyperbolic fixed points via bounded local identity maps"};
  app.require_subcommand(1);

  std::string scenario_path, builtin_id;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  RunOptions opt;

  using Command = int (*)(const Scenario&, const RunOptions&, std::ostream&);
  std::vector<std::pair<CLI::App*, Command>> commands;
  auto add = [&](const char* name, const char* help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* sc = sub->add_option("--scenario", scenario_path, "Scenario JSON file");
    auto* bi = sub->add_option("--builtin", builtin_id, "Builtin scenario id");
    sc->excludes(bi);
    sub->add_option("--out", opt.out_dir, "Output directory for reports")->capture_default_str();
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--samples", samples, "Override the sample count (>= 1000)");
    sub->add_flag("--quiet", opt.quiet, "Only the exit code and diagnostics");
    commands.emplace_back(sub, fn);
    return sub;
  };
  add("check-blid", "Local identity and c0/c1 bound suites for the blid map", cmd_check_blid);
  add("cutoff-verify", "Check the globalized derivative bounds", cmd_cutoff_verify);
  CLI::App* lin = add("linearize", "Evaluate Phi, its inverse and residuals", cmd_linearize);
  lin->add_option("--points", opt.points_path, "CSV file with one point per line");
  lin->add_option("--sample", opt.sample_points, "Random points in the identity ball")
      ->capture_default_str();
  add("fit-beta", "Fit the exponent of |Phi(x) - x| and of the inverse", cmd_fit_beta);
  add("spectral", "Stable/unstable splitting and band-width predicate", cmd_spectral);
  CLI::App* list = app.add_subcommand("builtins", "List builtin scenario ids");
  std::string dump_id;
  list->add_option("--show", dump_id, "Print the JSON of one builtin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (list->parsed()) {
      if (!dump_id.empty()) {
        out << builtin_json(dump_id) << "\n";
      } else {
        for (const auto& id : builtin_ids()) out << id << "\n";
      }
      return kPass;
    }
    for (const auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      if (scenario_path.empty() == builtin_id.empty()) {
        err << "error: give exactly one of --scenario or --builtin\n";
        return kConfigError;
      }
      Scenario s = builtin_id.empty() ? load_scenario_file(scenario_path) : builtin_scenario(builtin_id);
      if (seed) s.seed = *seed;
      if (samples) {
        if (*samples < 1000) throw ConfigError("--samples must be >= 1000");
        s.samples = *samples;
      }
      std::error_code ec;
      std::filesystem::create_directories(opt.out_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + opt.out_dir + "': " + ec.message());
      return fn(s, opt, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kViolation;
  } catch (const DegenerateFitError& e) {
    err << "degenerate fit: " << e.what() << "\n";
    return kViolation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  err << "error: no subcommand\n";
  return kConfigError;
}

}  // namespace blidkit::cli
