#include "blidkit/conjugacy.hpp"
#include "blidkit/errors.hpp"
#include "blidkit/scenario.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace blidkit;
using testing::builtin_solver;
using testing::solver_for;

namespace {

// Root of an increasing scalar function on [lo, hi] by plain bisection.
double bisect(const std::function<double(double)>& fn, double target, double lo, double hi) {
  for (int it = 0; it < 400 && lo < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (fn(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// lim lambda^-n F~^n(x) for a contracting scalar map.
double koenigs_forward(const std::function<double(double)>& F, double lambda, double x, int n) {
  double y = x, scale = 1.0;
  for (int k = 0; k < n; ++k) {
    y = F(y);
    scale /= lambda;
  }
  return y * scale;
}

// lim lambda^n F~^-n(x) for an expanding scalar map, inverting by bisection.
double koenigs_backward(const std::function<double(double)>& F, double lambda, double x, int n) {
  double z = x, scale = 1.0;
  for (int k = 0; k < n; ++k) {
    const double guess = z / lambda;
    const double w = std::abs(guess) * 0.5 + 1e-300;
    z = bisect(F, z, guess - w, guess + w);
    scale *= lambda;
  }
  return z * scale;
}

}  // namespace

TEST_SUITE("conjugacy") {

TEST_CASE("koenigs-1d series matches the Koenigs iteration") {
  const ConjugacySolver solver = builtin_solver("koenigs-1d");
  CHECK(solver.realization() == Realization::koenigs);
  const auto F = [&](double t) { return solver.F(Vector::Constant(1, t))(0); };
  for (int i = 0; i < 50; ++i) {
    const double x = -0.1 + 0.2 * i / 49.0;
    const double oracle = koenigs_forward(F, 0.5, x, 80);
    CHECK(std::abs(solver.Phi(Vector::Constant(1, x))(0) - oracle) <= 1e-10);
  }
}

TEST_CASE("invert_F agrees with bisection") {
  const ConjugacySolver solver = builtin_solver("koenigs-1d");
  const auto F = [&](double t) { return solver.F(Vector::Constant(1, t))(0); };
  for (double y : {-0.5, -0.05, 1e-8, 0.01, 0.2, 3.0}) {
    const double x = solver.invert_F(Vector::Constant(1, y))(0);
    const double oracle = bisect(F, y, -100.0, 100.0);
    // The residual target is inversion_tol * max(1, |y|) and dF~ >= 0.5 - Lip(f~) > 0.1.
    CHECK(std::abs(x - oracle) <= 1e-13 * std::max(1.0, std::abs(y)));
  }
}

TEST_CASE("conjugacy residual and inverse consistency on every builtin") {
  for (const auto& id : builtin_ids()) {
    if (id == "c01-nemytskii-1024") continue;  // covered by the acceptance run
    const Scenario s = builtin_scenario(id);
    const ConjugacySolver solver = solver_for(s);
    PointSampler sampler(s.space, 3);
    double worst_res = 0.0, worst_inv = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vector x = sampler.in_ball(solver.map().identity_radius());
      worst_res = std::max(worst_res, solver.residual(x));
      worst_inv = std::max(worst_inv, s.space.norm_of(solver.Phi(solver.phi_inverse(x)) - x));
    }
    CHECK_MESSAGE(worst_res <= 10 * s.solver.series_tol, id);
    CHECK_MESSAGE(worst_inv <= 1e-7, id);
  }
}

TEST_CASE("saddle: the unstable part vanishes and the functional equation holds") {
  const Scenario s = builtin_scenario("saddle-2d");
  const ConjugacySolver solver = solver_for(s);
  CHECK(solver.realization() == Realization::bounded);
  CHECK(solver.stable_terms() > 0);
  PointSampler sampler(s.space, 4);
  for (int i = 0; i < 20; ++i) {
    const Vector x = sampler.in_ball(0.1);
    const auto parts = solver.phi_parts(x);
    CHECK(parts.unstable.norm() == 0.0);
    CHECK(parts.stable(1) == 0.0);
    // Lambda phi(x) = phi(F~ x) + f~(x)
    const Vector lhs = s.lambda * solver.phi(x);
    const Vector rhs = solver.phi(solver.F(x)) + solver.map().f_tilde(x);
    CHECK((lhs - rhs).norm() <= 1e-9);
  }
}

TEST_CASE("bounded realization stays bounded far from the origin") {
  const ConjugacySolver solver = builtin_solver("saddle-2d");
  PointSampler sampler(solver.space(), 5);
  for (int i = 0; i < 50; ++i) {
    const Vector x = sampler.log_radial(0.1, 100.0);
    CHECK(solver.phi(x).norm() <= solver.phi_sup_bound());
  }
}

TEST_CASE("both realizations conjugate a contraction") {
  Scenario s = builtin_scenario("koenigs-1d");
  s.solver.realization = Realization::bounded;
  const ConjugacySolver bounded = solver_for(s);
  const ConjugacySolver koenigs = builtin_solver("koenigs-1d");
  for (double x : {-0.1, -0.01, 0.003, 0.08}) {
    const Vector v = Vector::Constant(1, x);
    CHECK(bounded.residual(v) <= 1e-9);
    CHECK(koenigs.residual(v) <= 1e-9);
  }
  // The bounded one is not tangent to the identity: |phi(x)| ~ |x| near 0.
  const double r = 1e-5;
  CHECK(std::abs(bounded.phi(Vector::Constant(1, r))(0)) > 1e3 * r * r);
  CHECK(std::abs(koenigs.phi(Vector::Constant(1, r))(0)) < 1.0 * r * r);
}

TEST_CASE("decoupled grid system matches per-coordinate Koenigs limits") {
  const Scenario s = builtin_scenario("c01-nemytskii");
  const ConjugacySolver solver = solver_for(s);
  CHECK(solver.decoupled());
  CHECK(solver.realization() == Realization::koenigs);
  PointSampler sampler(s.space, 6);
  const Vector x = sampler.in_ball(solver.map().identity_radius());
  const Vector phi = solver.Phi(x);
  const int n = s.space.dim;
  for (int i = 0; i < n; i += 7) {
    const double lam = s.lambda(i, i);
    const auto Fi = [&](double t) {
      Vector e = Vector::Zero(n);
      e(i) = t;
      return solver.F(e)(i);
    };
    const double oracle = lam < 1.0 ? koenigs_forward(Fi, lam, x(i), 120)
                                    : koenigs_backward(Fi, lam, x(i), 90);
    CHECK(std::abs(phi(i) - oracle) <= s.solver.series_tol);
  }
}

TEST_CASE("bounded realization also conjugates the decoupled grid system") {
  Scenario s = builtin_scenario("c01-nemytskii");
  s.solver.realization = Realization::bounded;
  const ConjugacySolver solver = solver_for(s);
  CHECK(solver.realization() == Realization::bounded);
  PointSampler sampler(s.space, 8);
  for (int i = 0; i < 10; ++i) {
    const Vector x = sampler.in_ball(solver.map().identity_radius());
    CHECK(solver.residual(x) <= 10 * s.solver.series_tol);
    CHECK(s.space.norm_of(solver.Phi(solver.phi_inverse(x)) - x) <= 1e-7);
  }
}

TEST_CASE("f = 0 gives the identity") {
  const ConjugacySolver solver = builtin_solver("c01-blid-eps2");
  PointSampler sampler(solver.space(), 7);
  const Vector x = sampler.in_ball(0.5);
  CHECK(solver.phi(x) == Vector::Zero(x.size()));
  CHECK(solver.phi_inverse(x) == x);
}

TEST_CASE("configuration errors") {
  Scenario s = builtin_scenario("quad-1d");
  s.smallness = 0.2;  // Lip(f~) |Lambda^-1| = 0.2 * c1 * 2 > 1
  CHECK_THROWS_AS(solver_for(s), ConfigError);

  Scenario saddle = builtin_scenario("saddle-2d");
  saddle.solver.realization = Realization::koenigs;
  CHECK_THROWS_AS(solver_for(saddle), ConfigError);

  Scenario q = builtin_scenario("quad-1d");
  Matrix other = Matrix::Constant(1, 1, 0.25);
  CHECK_THROWS_AS(ConjugacySolver(q.globalized(), split(other), q.solver), ConfigError);

  Scenario tiny = builtin_scenario("saddle-2d");
  tiny.solver.max_terms = 3;
  CHECK_THROWS_AS(solver_for(tiny), NumericalError);

  const ConjugacySolver ok = builtin_solver("quad-1d");
  CHECK_THROWS_AS(ok.phi(Vector::Zero(2)), UsageError);
  CHECK(ok.contraction_factor() < 1.0);
}

}
