#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ege/quadrature.hpp"
#include "oracles.hpp"

namespace quad = ege::quadrature;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

TEST_CASE("polynomial and log integrals") {
  auto lin = quad::integrate_finite([](double x) { return x; }, 0.0, 1.0, 1e-12);
  CHECK(lin.value == doctest::Approx(0.5).epsilon(1e-12));

  // int_0^1 log(x)^2 dx = [2x - 2x log x + x log^2 x]_0^1 = 2
  auto logsq = quad::integrate_finite(
      [](double x) { return std::log(x) * std::log(x); }, 0.0, 1.0, 1e-10);
  CHECK(logsq.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("log^2 kink integrand with interior singular point") {
  auto f = [](double chi) {
    const double l = std::log(std::abs(1.0 - chi));
    const double v = chi / 2.0 - chi / 4.0 * l;
    return v * v;
  };
  auto r = quad::integrate_finite(f, 0.0, 2.0, 1e-10, {1.0});

  // graded fixed-mesh oracle: chi = 1 -+ u^4 on both sides of the singularity
  // chi = 1 -+ u^4, with log|1 - chi| = 4 log(u) computed analytically so the
  // mesh is immune to 1 - t rounding back to 1
  auto graded = [](double u, double side) {
    if (u == 0.0) return 0.0;
    const double t = u * u * u * u;
    const double chi = 1.0 + side * t;
    const double v = chi / 2.0 - chi / 4.0 * (4.0 * std::log(u));
    return v * v * 4.0 * u * u * u;
  };
  auto left = [&](double u) { return graded(u, -1.0); };
  auto right = [&](double u) { return graded(u, +1.0); };
  const double mesh =
      oracles::simpson(left, 0.0, 1.0, 200000) +
      oracles::simpson(right, 0.0, 1.0, 200000);
  CHECK(r.value == doctest::Approx(mesh).epsilon(1e-8));
  // exact: 2/3 + 5/9 + 7/27 = 40/27
  CHECK(r.value == doctest::Approx(40.0 / 27.0).epsilon(1e-9));
}

TEST_CASE("oscillatory tail: sinc^2") {
  // int_5^inf (sin s/s)^2 ds = sin^2(5)/5 + pi/2 - Si(10)
  auto r = quad::integrate_oscillatory_tail(
      [](double s) { return 1.0 / (s * s); }, 1.0 / kPi, 5.0, 1e-10);
  auto si10 = quad::integrate_finite(
      [](double s) { return s == 0.0 ? 1.0 : std::sin(s) / s; }, 0.0, 10.0,
      1e-13);
  const double expect =
      std::sin(5.0) * std::sin(5.0) / 5.0 + kPi / 2.0 - si10.value;
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("oscillatory tail: zero frequency is the plain envelope") {
  auto r = quad::integrate_oscillatory_tail(
      [](double k) { return 1.0 / (k * k); }, 0.0, 3.0, 1e-12);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("oscillatory tail: number-variance style integrand") {
  // envelope of the slowly-decaying residual term in the orthogonal-ensemble
  // number variance, integrated against sin^2(pi k Delta) from k = 1
  const double delta = 2.5;
  auto envelope = [](double k) {
    const double l = std::log((2.0 * k + 1.0) / (2.0 * k - 1.0));
    const double kl = k * l;
    return (3.0 + kl * kl - 4.0 * kl) / (kPi * kPi * k * k);
  };
  auto r = quad::integrate_oscillatory_tail(envelope, delta, 1.0, 1e-9);

  auto full = [&](double k) {
    const double s = std::sin(kPi * k * delta);
    return envelope(k) * s * s;
  };
  // fine-mesh oracle on [1, 1e4]; the tail beyond is < 1e-13
  const double mesh = oracles::simpson(full, 1.0, 1e4, 4000000);
  CHECK(r.value == doctest::Approx(mesh).epsilon(1e-6));
}

TEST_CASE("oscillatory tail rejects non-decaying envelopes") {
  CHECK_THROWS_AS(quad::integrate_oscillatory_tail(
                      [](double) { return 1.0; }, 1.0, 1.0, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("error estimates are conservative") {
  struct Known {
    quad::Integrand f;
    double a, b, exact;
  };
  const std::vector<Known> suite = {
      {[](double x) { return x * x; }, 0.0, 3.0, 9.0},
      {[](double x) { return std::exp(x); }, 0.0, 1.0, std::exp(1.0) - 1.0},
      {[](double x) { return std::sin(x); }, 0.0, kPi, 2.0},
      {[](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, kPi / 4.0},
      {[](double x) { return std::sqrt(x); }, 0.0, 1.0, 2.0 / 3.0},
      {[](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
      {[](double x) { return std::cos(10.0 * x); }, 0.0, 1.0,
       std::sin(10.0) / 10.0},
      {[](double x) { return std::exp(-x * x); }, -5.0, 5.0,
       std::sqrt(kPi) * std::erf(5.0)},
      {[](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0, 4.0},
      {[](double x) { return x * std::log(x); }, 0.0, 1.0, -0.25},
      {[](double x) { return std::sin(50.0 * x) * std::sin(50.0 * x); }, 0.0,
       2.0 * kPi, kPi},
      {[](double x) { return std::cosh(x); }, -1.0, 1.0, 2.0 * std::sinh(1.0)},
      {[](double x) { return std::pow(x, 1.5); }, 0.0, 1.0, 0.4},
      {[](double x) { return 1.0 / (x * x); }, 1.0, 10.0, 0.9},
      {[](double x) { return std::atan(x); }, 0.0, 1.0,
       kPi / 4.0 - 0.5 * std::log(2.0)},
      {[](double x) { return std::exp(-x) * std::sin(x); }, 0.0, 20.0,
       0.5 * (1.0 - std::exp(-20.0) * (std::sin(20.0) + std::cos(20.0)))},
      {[](double x) { return std::abs(x - 0.3); }, 0.0, 1.0,
       0.5 * (0.09 + 0.49)},
      {[](double x) { return x * x * x - 2.0 * x; }, -2.0, 2.0, 0.0},
      {[](double x) { return std::log(x) * std::log(x); }, 0.0, 1.0, 2.0},
      {[](double x) { return std::sin(x) / x; }, 1e-12, 1.0,
       0.9460830703671831},
  };

  int covered = 0;
  for (const auto& k : suite) {
    auto r = quad::integrate_finite(k.f, k.a, k.b, 1e-9);
    if (std::abs(r.value - k.exact) <= std::max(r.abs_error_estimate, 1e-15))
      ++covered;
  }
  CHECK(covered >= 19);  // >= 95% of 20
}

TEST_CASE("determinism") {
  auto f = [](double x) { return std::sin(3.0 * x) / (1.0 + x); };
  auto r1 = quad::integrate_finite(f, 0.0, 7.0, 1e-11);
  auto r2 = quad::integrate_finite(f, 0.0, 7.0, 1e-11);
  CHECK(r1.value == r2.value);
  CHECK(r1.abs_error_estimate == r2.abs_error_estimate);
  CHECK(r1.evaluations == r2.evaluations);
}

TEST_CASE("budget exhaustion carries the best estimate") {
  auto nasty = [](double x) { return std::sin(1.0 / x) / x; };
  try {
    quad::integrate_finite(nasty, 1e-8, 1.0, 1e-14, {}, 3000);
    FAIL("expected QuadratureError");
  } catch (const quad::QuadratureError& e) {
    CHECK(e.best_result.evaluations <= 3000);
    CHECK(e.best_result.abs_error_estimate > 0.0);
  }
}
