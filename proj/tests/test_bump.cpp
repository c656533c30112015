#include "blidkit/bump.hpp"
#include "blidkit/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <utility>

using namespace blidkit;

TEST_SUITE("bump") {

TEST_CASE("plateau, support and range") {
  const BumpFunction h = make_bump(1.0, 2.0);
  for (double t : {0.0, 0.3, -0.7, 1.0, -1.0}) CHECK(h(t) == 1.0);
  for (double t : {2.0, -2.0, 2.5, 1e6, -40.0}) CHECK(h(t) == 0.0);
  double prev = 1.0;
  for (int i = 1; i < 100; ++i) {
    const double t = 1.0 + i / 100.0;
    CHECK(h(t) <= prev);
    CHECK(h(-t) == h(t));
    prev = h(t);
  }
  // Near the ends exp(-1/s) underflows relative to the other term; the interior is strict.
  for (int i = 10; i <= 90; ++i) {
    CHECK(h(1.0 + i / 100.0) > 0.0);
    CHECK(h(1.0 + i / 100.0) < 1.0);
  }
}

TEST_CASE("transition is antisymmetric about the midpoint") {
  // h(r1 + r2 - t) = 1 - h(t) follows from swapping the two mollifier arguments.
  const BumpFunction h = make_bump(0.5, 3.0);
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.5 + 2.5 * i / 50.0;
    CHECK(h(3.5 - t) == doctest::Approx(1.0 - h(t)).epsilon(1e-13));
  }
}

TEST_CASE("analytic derivatives match central differences") {
  const BumpFunction h = make_bump(1.0, 2.0);
  const double e = 1e-6;
  for (int i = 1; i < 200; ++i) {
    const double t = 0.9 + 1.2 * i / 200.0;
    const double fd1 = (h(t + e) - h(t - e)) / (2 * e);
    const double fd2 = (h.deriv(t + e, 1) - h.deriv(t - e, 1)) / (2 * e);
    CHECK(h.deriv(t, 1) == doctest::Approx(fd1).epsilon(1e-6).scale(1.0));
    CHECK(bump_deriv(h, t, 2) == doctest::Approx(fd2).epsilon(1e-5).scale(1.0));
    CHECK(h.deriv(-t, 1) == doctest::Approx(-h.deriv(t, 1)));
  }
  CHECK(h.deriv(0.5, 1) == 0.0);
  CHECK(h.deriv(3.0, 2) == 0.0);
  CHECK_THROWS_AS(h.deriv(1.5, 3), UsageError);
}

TEST_CASE("sup|h'| agrees with a brute-force grid") {
  const BumpFunction h = make_bump(1.0, 2.0);
  double brute = 0.0;
  for (int i = 0; i <= 1000000; ++i) brute = std::max(brute, std::abs(h.deriv(1.0 + i * 1e-6, 1)));
  const SupEstimate s = sup_abs_deriv(h, 1);
  CHECK(s.value >= brute - 1e-12);
  CHECK(s.value == doctest::Approx(brute).epsilon(1e-9));
  CHECK(h.derivative_sup_order1() == doctest::Approx(s.value).epsilon(1e-12));
  CHECK(s.argmax > 1.0);
  CHECK(s.argmax < 2.0);
  CHECK(s.grid_points == 10000);
}

TEST_CASE("sup|h'| respects the mean value bound") {
  // h falls from 1 to 0 across [r1, r2], so sup|h'| >= 1 / (r2 - r1).
  for (auto [r1, r2] : {std::pair{1.0, 2.0}, std::pair{0.5, 0.6}, std::pair{2.0, 10.0}}) {
    CHECK(make_bump(r1, r2).derivative_sup_order1() >= 1.0 / (r2 - r1));
  }
}

TEST_CASE("invalid radii are rejected") {
  CHECK_THROWS_AS(make_bump(2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_bump(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_bump(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_bump(1.0, NAN), ConfigError);
}

}
