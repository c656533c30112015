#include "blidkit/scenario.hpp"

#include "blidkit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace blidkit {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("scenario field '" + path + "': " + what);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) field_error(path + "/" + k, "unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) field_error(path + "/" + key, "missing");
  return obj.at(key);
}

const json& require_object(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_object()) field_error(path + "/" + key, "expected an object");
  return v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(path, "must be finite");
  return d;
}

double number(const json& obj, const std::string& path, const char* key) {
  return as_number(require(obj, path, key), path + "/" + key);
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? as_number(obj.at(key), path + "/" + key) : fallback;
}

long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  return v.get<long long>();
}

int int_or(const json& obj, const std::string& path, const char* key, int fallback, int min) {
  if (!obj.contains(key)) return fallback;
  const long long v = integer(obj.at(key), path + "/" + key);
  if (v < min || v > 100000000) field_error(path + "/" + key, "must be >= " + std::to_string(min));
  return static_cast<int>(v);
}

std::string string_field(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) field_error(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

SpaceDesc parse_space(const json& root) {
  const std::string p = "/space";
  const json& s = require_object(root, "", "space");
  const std::string kind = string_field(s, p, "kind");
  if (kind == "finite_dim") {
    reject_unknown(s, p, {"kind", "dim", "norm"});
    const long long n = integer(require(s, p, "dim"), p + "/dim");
    if (n < 1 || n > 4096) field_error(p + "/dim", "must be in [1, 4096]");
    NormKind norm = NormKind::euclidean;
    if (s.contains("norm")) {
      const std::string nm = string_field(s, p, "norm");
      if (nm == "sup") norm = NormKind::sup;
      else if (nm != "euclidean") field_error(p + "/norm", "expected 'euclidean' or 'sup'");
    }
    return SpaceDesc::finite(static_cast<int>(n), norm);
  }
  if (kind == "grid_function") {
    reject_unknown(s, p, {"kind", "grid_size", "norm"});
    const long long n = integer(require(s, p, "grid_size"), p + "/grid_size");
    if (n < 2 || n > 1 << 16) field_error(p + "/grid_size", "must be in [2, 65536]");
    if (s.contains("norm") && string_field(s, p, "norm") != "sup") {
      field_error(p + "/norm", "grid functions always use the sup norm");
    }
    return SpaceDesc::grid(static_cast<int>(n));
  }
  field_error(p + "/kind", "expected 'finite_dim' or 'grid_function'");
}

Matrix parse_lambda(const json& root, int n) {
  const std::string p = "/lambda";
  const json& l = require_object(root, "", "lambda");
  reject_unknown(l, p, {"diagonal", "rows"});
  if (l.contains("diagonal") == l.contains("rows")) {
    field_error(p, "give exactly one of 'diagonal' or 'rows'");
  }
  if (l.contains("diagonal")) {
    const auto d = number_array(l.at("diagonal"), p + "/diagonal");
    if (static_cast<int>(d.size()) != n) {
      field_error(p + "/diagonal", "expected " + std::to_string(n) + " entries");
    }
    return Eigen::Map<const Vector>(d.data(), n).asDiagonal();
  }
  const json& rows = l.at("rows");
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    field_error(p + "/rows", "expected " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto r = number_array(rows[i], p + "/rows/" + std::to_string(i));
    if (static_cast<int>(r.size()) != n) {
      field_error(p + "/rows/" + std::to_string(i), "expected " + std::to_string(n) + " entries");
    }
    for (int j = 0; j < n; ++j) m(i, j) = r[j];
  }
  return m;
}

NonlinearPart parse_f(const json& root, const SpaceDesc& space) {
  const std::string p = "/f";
  const json& f = require_object(root, "", "f");
  if (space.kind == SpaceKind::grid_function) {
    reject_unknown(f, p, {"g"});
    return NemytskiiMap(number_array(require(f, p, "g"), p + "/g"));
  }
  reject_unknown(f, p, {"terms"});
  const json& terms = require(f, p, "terms");
  if (!terms.is_array()) field_error(p + "/terms", "expected an array");
  std::vector<Monomial> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = p + "/terms/" + std::to_string(i);
    const json& t = terms[i];
    if (!t.is_object()) field_error(tp, "expected an object");
    reject_unknown(t, tp, {"coordinate", "coefficient", "exponents"});
    Monomial m;
    const long long c = integer(require(t, tp, "coordinate"), tp + "/coordinate");
    if (c < 0 || c >= space.dim) field_error(tp + "/coordinate", "out of range");
    m.coordinate = static_cast<int>(c);
    m.coefficient = number(t, tp, "coefficient");
    const json& e = require(t, tp, "exponents");
    if (!e.is_array() || static_cast<int>(e.size()) != space.dim) {
      field_error(tp + "/exponents", "expected " + std::to_string(space.dim) + " integers");
    }
    for (std::size_t j = 0; j < e.size(); ++j) {
      const long long ej = integer(e[j], tp + "/exponents/" + std::to_string(j));
      if (ej < 0 || ej > 16) field_error(tp + "/exponents/" + std::to_string(j), "must be in [0, 16]");
      m.exponents.push_back(static_cast<int>(ej));
    }
    out.push_back(std::move(m));
  }
  return PolynomialMap(space.dim, std::move(out));
}

Scenario parse_document(const json& root) {
  if (!root.is_object()) throw ConfigError("scenario: top level must be a JSON object");
  reject_unknown(root, "", {"id", "space", "lambda", "f", "bump", "blid", "delta", "alpha", "M",
                            "delta_eta", "domain_radius", "tolerances", "conjugacy", "seed",
                            "samples", "fit", "band_predicate"});
  Scenario s;
  s.id = string_field(root, "", "id");
  if (s.id.empty() || s.id.find_first_of(",\"\n\r") != std::string::npos) {
    field_error("/id", "must be non-empty without commas, quotes or newlines");
  }
  s.space = parse_space(root);
  s.lambda = parse_lambda(root, s.space.dim);
  s.f = parse_f(root, s.space);

  const json& bump = require_object(root, "", "bump");
  reject_unknown(bump, "/bump", {"r1", "r2"});
  s.r1 = number(bump, "/bump", "r1");
  s.r2 = number(bump, "/bump", "r2");
  if (!(s.r1 > 0.0) || !(s.r2 > s.r1)) field_error("/bump", "need 0 < r1 < r2");

  s.variant = s.space.kind == SpaceKind::grid_function || s.space.norm == NormKind::sup
                  ? BlidVariant::pointwise
                  : BlidVariant::radial;
  if (root.contains("blid")) {
    const json& b = root.at("blid");
    if (!b.is_object()) field_error("/blid", "expected an object");
    reject_unknown(b, "/blid", {"variant", "c0", "c1"});
    if (b.contains("variant")) {
      const std::string v = string_field(b, "/blid", "variant");
      if (v == "radial") s.variant = BlidVariant::radial;
      else if (v == "pointwise") s.variant = BlidVariant::pointwise;
      else field_error("/blid/variant", "expected 'radial' or 'pointwise'");
    }
    if (b.contains("c0")) s.declared_c0 = number(b, "/blid", "c0");
    if (b.contains("c1")) s.declared_c1 = number(b, "/blid", "c1");
  }

  if (root.contains("delta")) {
    s.delta = number(root, "", "delta");
    if (!(*s.delta > 0.0)) field_error("/delta", "must be > 0");
  }
  s.alpha = number(root, "", "alpha");
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) field_error("/alpha", "must lie in (0, 1]");
  s.holder_constant = number(root, "", "M");
  if (s.holder_constant < 0.0) field_error("/M", "must be >= 0");
  s.smallness = number(root, "", "delta_eta");
  if (!(s.smallness > 0.0)) field_error("/delta_eta", "must be > 0");
  s.domain_radius = number(root, "", "domain_radius");
  if (!(s.domain_radius > 0.0)) field_error("/domain_radius", "must be > 0");

  if (root.contains("tolerances")) {
    const json& t = root.at("tolerances");
    if (!t.is_object()) field_error("/tolerances", "expected an object");
    reject_unknown(t, "/tolerances", {"series_tol", "inversion_tol", "hyperbolicity_tol"});
    s.solver.series_tol = number_or(t, "/tolerances", "series_tol", s.solver.series_tol);
    s.solver.inversion_tol = number_or(t, "/tolerances", "inversion_tol", s.solver.inversion_tol);
    s.hyperbolicity_tol = number_or(t, "/tolerances", "hyperbolicity_tol", s.hyperbolicity_tol);
    if (!(s.solver.series_tol > 0.0) || !(s.solver.inversion_tol > 0.0) || !(s.hyperbolicity_tol > 0.0)) {
      field_error("/tolerances", "all tolerances must be > 0");
    }
  }
  if (root.contains("conjugacy")) {
    const json& c = root.at("conjugacy");
    if (!c.is_object()) field_error("/conjugacy", "expected an object");
    reject_unknown(c, "/conjugacy", {"realization", "max_terms", "inversion_max_iters"});
    if (c.contains("realization")) {
      const std::string r = string_field(c, "/conjugacy", "realization");
      if (r == "auto") s.solver.realization = Realization::automatic;
      else if (r == "bounded") s.solver.realization = Realization::bounded;
      else if (r == "koenigs") s.solver.realization = Realization::koenigs;
      else field_error("/conjugacy/realization", "expected 'auto', 'bounded' or 'koenigs'");
    }
    s.solver.max_terms = int_or(c, "/conjugacy", "max_terms", s.solver.max_terms, 1);
    s.solver.inversion_max_iters =
        int_or(c, "/conjugacy", "inversion_max_iters", s.solver.inversion_max_iters, 1);
  }
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned()) field_error("/seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  s.samples = int_or(root, "", "samples", s.samples, 1000);
  if (root.contains("fit")) {
    const json& f = root.at("fit");
    if (!f.is_object()) field_error("/fit", "expected an object");
    reject_unknown(f, "/fit", {"radius_min", "radius_max", "radius_count", "directions", "beta_target"});
    s.fit.radius_min = number_or(f, "/fit", "radius_min", s.fit.radius_min);
    s.fit.radius_max = number_or(f, "/fit", "radius_max", s.fit.radius_max);
    s.fit.radius_count = int_or(f, "/fit", "radius_count", s.fit.radius_count, 2);
    s.fit.directions = int_or(f, "/fit", "directions", s.fit.directions, 8);
    if (f.contains("beta_target")) s.fit.beta_target = number(f, "/fit", "beta_target");
    if (!(s.fit.radius_min > 0.0) || !(s.fit.radius_max > s.fit.radius_min)) {
      field_error("/fit", "need 0 < radius_min < radius_max");
    }
  }
  if (root.contains("band_predicate")) s.band_predicate = string_field(root, "", "band_predicate");
  return s;
}

// --- builtin library -------------------------------------------------------------------------

ojson monomial(int coordinate, double coefficient, std::vector<int> exponents) {
  return ojson{{"coordinate", coordinate}, {"coefficient", coefficient}, {"exponents", exponents}};
}

std::vector<double> nemytskii_multiplier(int n) {
  // First half of the grid in [0.3, 0.7], second half in [1.5, 2.5].
  std::vector<double> d(n);
  const int half = n / 2;
  for (int i = 0; i < n; ++i) {
    if (i < half) d[i] = 0.3 + 0.4 * (half > 1 ? static_cast<double>(i) / (half - 1) : 0.0);
    else d[i] = 1.5 + 1.0 * (n - half > 1 ? static_cast<double>(i - half) / (n - half - 1) : 0.0);
  }
  return d;
}

ojson nemytskii_doc(const std::string& id, int n, double g2) {
  ojson doc;
  doc["id"] = id;
  doc["space"] = {{"kind", "grid_function"}, {"grid_size", n}};
  doc["lambda"] = {{"diagonal", nemytskii_multiplier(n)}};
  doc["f"] = {{"g", g2 == 0.0 ? std::vector<double>{} : std::vector<double>{0.0, 0.0, g2}}};
  doc["bump"] = {{"r1", 1.0}, {"r2", 2.0}};
  doc["blid"] = {{"variant", "pointwise"}};
  doc["alpha"] = 1.0;
  doc["M"] = 2.0 * g2;
  doc["domain_radius"] = 0.4;
  doc["delta_eta"] = g2 == 0.0 ? 1e-3 : 2.0 * g2 * 0.4;
  doc["tolerances"] = {{"series_tol", 1e-8}, {"inversion_tol", 1e-14}, {"hyperbolicity_tol", 1e-6}};
  doc["seed"] = 2024;
  doc["fit"] = {{"radius_min", 1e-4}, {"radius_max", 5e-2}, {"radius_count", 24}, {"directions", 8}};
  return doc;
}

ojson builtin_doc(const std::string& id) {
  ojson doc;
  if (id == "koenigs-1d") {
    doc["id"] = id;
    doc["space"] = {{"kind", "finite_dim"}, {"dim", 1}, {"norm", "euclidean"}};
    doc["lambda"] = {{"diagonal", {0.5}}};
    doc["f"] = {{"terms", {monomial(0, 0.1, {2})}}};
    doc["bump"] = {{"r1", 1.0}, {"r2", 2.0}};
    doc["blid"] = {{"variant", "radial"}};
    doc["delta"] = 0.15;
    doc["alpha"] = 1.0;
    doc["M"] = 0.2;
    doc["domain_radius"] = 0.3;
    doc["delta_eta"] = 0.06;
    doc["tolerances"] = {{"series_tol", 1e-10}, {"inversion_tol", 1e-14}, {"hyperbolicity_tol", 1e-6}};
    doc["seed"] = 7;
    doc["fit"] = {{"radius_min", 1e-6}, {"radius_max", 1e-2}, {"radius_count", 24}, {"directions", 8}};
    return doc;
  }
  if (id == "quad-1d") {
    doc["id"] = id;
    doc["space"] = {{"kind", "finite_dim"}, {"dim", 1}, {"norm", "sup"}};
    doc["lambda"] = {{"diagonal", {0.5}}};
    doc["f"] = {{"terms", {monomial(0, 1.0, {2})}}};
    doc["bump"] = {{"r1", 1.0}, {"r2", 2.0}};
    doc["blid"] = {{"variant", "pointwise"}};
    doc["alpha"] = 1.0;
    doc["M"] = 2.0;
    doc["domain_radius"] = 0.02;
    doc["delta_eta"] = 0.04;
    doc["tolerances"] = {{"series_tol", 1e-10}, {"inversion_tol", 1e-14}, {"hyperbolicity_tol", 1e-6}};
    doc["seed"] = 11;
    doc["fit"] = {{"radius_min", 1e-6}, {"radius_max", 1e-3}, {"radius_count", 24}, {"directions", 8}};
    return doc;
  }
  if (id == "saddle-2d") {
    // Coordinates (s, u). The nonlinearity lives in the stable component only.
    doc["id"] = id;
    doc["space"] = {{"kind", "finite_dim"}, {"dim", 2}, {"norm", "euclidean"}};
    doc["lambda"] = {{"diagonal", {0.5, 2.0}}};
    doc["f"] = {{"terms", {monomial(0, 0.2, {1, 1}), monomial(0, 0.1, {0, 2})}}};
    doc["bump"] = {{"r1", 1.0}, {"r2", 2.0}};
    doc["blid"] = {{"variant", "radial"}};
    doc["delta"] = 0.1;
    doc["alpha"] = 1.0;
    doc["M"] = 0.33;
    doc["domain_radius"] = 0.2;
    doc["delta_eta"] = 0.066;
    doc["tolerances"] = {{"series_tol", 1e-10}, {"inversion_tol", 1e-14}, {"hyperbolicity_tol", 1e-6}};
    doc["seed"] = 13;
    doc["fit"] = {{"radius_min", 1e-6}, {"radius_max", 1e-2}, {"radius_count", 24}, {"directions", 16}};
    return doc;
  }
  if (id == "band-3d") {
    doc["id"] = id;
    doc["space"] = {{"kind", "finite_dim"}, {"dim", 3}, {"norm", "euclidean"}};
    doc["lambda"] = {{"diagonal", {0.2, 0.9, 2.0}}};
    doc["f"] = {{"terms", {monomial(0, 0.1, {0, 0, 2}), monomial(1, 0.1, {0, 0, 2})}}};
    doc["bump"] = {{"r1", 1.0}, {"r2", 2.0}};
    doc["blid"] = {{"variant", "radial"}};
    doc["delta"] = 0.05;
    doc["alpha"] = 1.0;
    doc["M"] = 0.3;
    doc["domain_radius"] = 0.1;
    doc["delta_eta"] = 0.03;
    doc["tolerances"] = {{"series_tol", 1e-10}, {"inversion_tol", 1e-14}, {"hyperbolicity_tol", 1e-6}};
    doc["seed"] = 17;
    doc["fit"] = {{"radius_min", 1e-6}, {"radius_max", 1e-2}, {"radius_count", 24}, {"directions", 16}};
    return doc;
  }
  if (id == "c01-nemytskii") return nemytskii_doc(id, 64, 0.05);
  if (id == "c01-nemytskii-256") return nemytskii_doc(id, 256, 0.05);
  if (id == "c01-nemytskii-1024") return nemytskii_doc(id, 1024, 0.05);
  if (id == "c01-blid-eps2") {
    doc = nemytskii_doc(id, 64, 0.0);
    doc["domain_radius"] = 4.0;
    return doc;
  }
  throw ConfigError("unknown builtin scenario '" + id + "'");
}

}  // namespace

BlidMap Scenario::blid() const {
  BlidMap H(space, variant, bump());
  H.declare_bounds(declared_c0, declared_c1);
  return H;
}

MapSpec Scenario::map_spec() const {
  MapSpec m{space, lambda, f, alpha, domain_radius, holder_constant, smallness};
  m.validate();
  return m;
}

double Scenario::effective_delta() const {
  if (delta) return *delta;
  return default_delta(map_spec(), blid());
}

GlobalizedMap Scenario::globalized() const {
  GlobalizedMap G = globalize(map_spec(), blid(), effective_delta());
  estimate_m(G, samples, seed);
  return G;
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, json_text.size());
    const long line = 1 + std::count(json_text.begin(), json_text.begin() + upto, '\n');
    throw ConfigError("scenario: JSON syntax error at line " + std::to_string(line) + ": " + e.what());
  }
  return parse_document(root);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<std::string> builtin_ids() {
  return {"koenigs-1d",        "quad-1d",           "saddle-2d",     "band-3d",
          "c01-nemytskii",     "c01-nemytskii-256", "c01-nemytskii-1024", "c01-blid-eps2"};
}

std::string builtin_json(const std::string& id) { return builtin_doc(id).dump(2); }

Scenario builtin_scenario(const std::string& id) { return parse_scenario(builtin_json(id)); }

}  // namespace blidkit
