#include "blidkit/cutoff.hpp"

#include "blidkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blidkit {
namespace {

bool within(double empirical, double bound) {
  return empirical <= bound + kInequalityRelTol * std::max(1.0, std::abs(bound));
}

double jacobian_norm(const SpaceDesc& sp, const NonlinearPart& f, const Vector& y) {
  if (f.is_diagonal()) return sp.diag_op_norm(f.jacobian_diagonal(y));
  return sp.op_norm(f.jacobian(y));
}

// Radius range used by the global estimators, in units of delta.
constexpr double kSmallScale = 1e-8;
constexpr double kLargeScale = 1e4;

}  // namespace

void MapSpec::validate() const {
  if (lambda.rows() != space.dim || lambda.cols() != space.dim) {
    throw ConfigError("map: Lambda must be " + std::to_string(space.dim) + "x" +
                      std::to_string(space.dim));
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("map: alpha must lie in (0, 1]");
  if (!(domain_radius > 0.0)) throw ConfigError("map: domain_radius must be > 0");
  if (!(holder_constant >= 0.0)) throw ConfigError("map: M must be >= 0");
  if (!(smallness > 0.0)) throw ConfigError("map: delta_eta must be > 0");
  const bool grid = space.kind == SpaceKind::grid_function;
  if (grid != f.is_diagonal()) {
    throw ConfigError(grid ? "map: grid_function spaces take a scalar polynomial g"
                           : "map: finite_dim spaces take a monomial table");
  }
  if (const auto* p = std::get_if<PolynomialMap>(&f.impl()); p && p->dim() != space.dim) {
    throw ConfigError("map: polynomial dimension does not match the space");
  }
  if (!f.vanishes_to_second_order()) {
    throw ConfigError("map: f must satisfy f(0) = 0 and Df(0) = 0 (no constant or linear terms)");
  }
}

LocalDataCheck check_local_data(const MapSpec& spec, int samples, std::uint64_t seed) {
  LocalDataCheck out;
  out.samples = samples;
  PointSampler sampler(spec.space, seed);
  for (int i = 0; i < samples; ++i) {
    // Half uniform in radius, half log-uniform so the neighbourhood of 0 is represented.
    const Vector y = (i % 2 == 0) ? sampler.in_ball(spec.domain_radius)
                                  : sampler.log_radial(1e-10, spec.domain_radius);
    const double ny = spec.space.norm_of(y);
    const double df = jacobian_norm(spec.space, spec.f, y);
    out.sup_df = std::max(out.sup_df, df);
    if (ny >= 1e-10) out.sup_holder_quotient = std::max(out.sup_holder_quotient, df / std::pow(ny, spec.alpha));
  }
  out.smallness_ok = within(out.sup_df, spec.smallness);
  out.holder_ok = within(out.sup_holder_quotient, spec.holder_constant);
  return out;
}

GlobalizedMap::GlobalizedMap(MapSpec base, BlidMap blid, double delta)
    : base_(std::move(base)), blid_(std::move(blid)), delta_(delta),
      lambda_diag_(diagonal_of(base_.lambda)) {}

Vector GlobalizedMap::apply_lambda(const Vector& x) const {
  if (lambda_diag_) return lambda_diag_->cwiseProduct(x);
  return base_.lambda * x;
}

Vector GlobalizedMap::localize(const Vector& x) const {
  // delta H(x / delta), written so the identity region reproduces x bit for bit.
  const BumpFunction& h = blid_.bump();
  if (blid_.variant() == BlidVariant::radial) {
    return h(x.squaredNorm() / (delta_ * delta_)) * x;
  }
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = h(x(i) / delta_) * x(i);
  return y;
}

Vector GlobalizedMap::f_tilde(const Vector& x) const {
  base_.space.check_point(x, "f_tilde");
  return base_.f.eval(localize(x));
}

Vector GlobalizedMap::df_tilde(const Vector& x, const Vector& v) const {
  base_.space.check_point(x, "df_tilde");
  base_.space.check_point(v, "df_tilde");
  const Vector y = localize(x);
  return base_.f.apply_jacobian(y, blid_.dderiv(x / delta_, v));
}

double GlobalizedMap::df_tilde_norm(const Vector& x) const {
  const Vector y = localize(x);
  const Vector xs = x / delta_;
  const SpaceDesc& sp = base_.space;
  if (base_.f.is_diagonal() && blid_.variant() == BlidVariant::pointwise) {
    return sp.diag_op_norm(base_.f.jacobian_diagonal(y).cwiseProduct(blid_.jacobian_diagonal(xs)));
  }
  return sp.op_norm(base_.f.jacobian(y) * blid_.jacobian(xs));
}

Vector GlobalizedMap::eval_F(const Vector& x) const {
  base_.space.check_point(x, "eval_globalized_F");
  return apply_lambda(x) + base_.f.eval(localize(x));
}

double GlobalizedMap::sup_f_tilde_bound() const {
  return base_.f.sup_bound(base_.space, delta_ * blid_.c0());
}

double default_delta(const MapSpec& base, const BlidMap& H) {
  return base.domain_radius / (2.0 * H.c0());
}

GlobalizedMap globalize(const MapSpec& base, const BlidMap& H, double delta) {
  base.validate();
  if (!(delta > 0.0)) throw ConfigError("globalize: delta must be > 0");
  if (!(H.space() == base.space)) {
    throw ConfigError("globalize: blid space " + H.space().describe() +
                      " differs from map space " + base.space.describe());
  }
  const double reach = delta * H.c0();
  if (reach > base.domain_radius * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "globalize: budget delta*c0 <= domain_radius violated (delta*c0 = " << reach
        << ", domain_radius = " << base.domain_radius << ")";
    throw ConfigError(msg.str());
  }
  return GlobalizedMap(base, H, delta);
}

MEstimate estimate_m(GlobalizedMap& G, int samples, std::uint64_t seed) {
  if (samples < 1000) throw UsageError("estimate_m: need at least 1000 samples");
  const SpaceDesc& sp = G.space();
  const BlidMap& H = G.blid();
  const double delta = G.delta();

  MEstimate out;
  out.threshold = H.identity_radius();
  out.bound = std::max(H.c1() + kInequalityRelTol, H.c0() / out.threshold);
  out.far_field_ok = true;

  PointSampler sampler(sp, seed);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = sampler.log_radial(kSmallScale * delta, kLargeScale * delta);
    const double nx = sp.norm_of(x);
    const double ratio = sp.norm_of(G.localize(x)) / nx;
    best = std::max(best, ratio);
    if (ratio == 1.0) out.identity_region_seen = true;
    if (nx / delta < out.threshold) {
      out.small_branch_max = std::max(out.small_branch_max, ratio);
    } else {
      out.large_branch_max = std::max(out.large_branch_max, ratio);
      if (!within(ratio, H.c0() * delta / nx)) out.far_field_ok = false;
    }
  }
  out.sup = {best, samples, seed};
  out.within_bound = std::isfinite(best) && within(best, out.bound);
  G.set_m(out.sup);
  return out;
}

Condition76Report check_condition_76(const GlobalizedMap& G, int samples, std::uint64_t seed) {
  if (samples < 1000) throw UsageError("check_condition_76: need at least 1000 samples");
  const SpaceDesc& sp = G.space();
  const MapSpec& base = G.base();
  const BlidMap& H = G.blid();
  const double delta = G.delta();

  Condition76Report rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.local = check_local_data(base, samples, seed ^ 0x9e3779b97f4a7c15ULL);

  PointSampler sampler(sp, seed);
  const double r2 = H.bump().support_radius();
  const double transition = 2.0 * delta * (H.variant() == BlidVariant::radial ? std::sqrt(r2) : r2);
  double sup_df = 0.0, sup_q = 0.0, m = G.m();
  for (int i = 0; i < samples; ++i) {
    const Vector x = (i % 2 == 0) ? sampler.log_radial(kSmallScale * delta, kLargeScale * delta)
                                  : sampler.in_ball(transition);
    const double nx = sp.norm_of(x);
    const double d = G.df_tilde_norm(x);
    sup_df = std::max(sup_df, d);
    if (nx >= 1e-10) {
      sup_q = std::max(sup_q, d / std::pow(nx, base.alpha));
      m = std::max(m, sp.norm_of(G.localize(x)) / nx);
    }
  }
  rep.m = m;
  rep.smallness = {"sup|Df~| <= delta_eta*c1", sup_df, base.smallness * H.c1(), false};
  rep.smallness.pass = within(rep.smallness.empirical, rep.smallness.bound);
  rep.holder = {"sup|Df~(x)|/|x|^alpha <= M*c1*m^alpha", sup_q,
                base.holder_constant * H.c1() * std::pow(m, base.alpha), false};
  rep.holder.pass = within(rep.holder.empirical, rep.holder.bound);
  return rep;
}

Vector eval_globalized_F(const GlobalizedMap& G, const Vector& x) { return G.eval_F(x); }

}  // namespace blidkit
