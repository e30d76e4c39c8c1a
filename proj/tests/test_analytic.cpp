#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ege/analytic.hpp"
#include "ege/quadrature.hpp"
#include "ege/specfun.hpp"

using namespace ege::analytic;
using ege::BetaKind;
namespace quad = ege::quadrature;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kPi2 = kPi * kPi;
const double kLog3 = std::log(3.0);
}  // namespace

TEST_CASE("one-particle form factors") {
  for (BetaKind b : {BetaKind::orthogonal, BetaKind::unitary, BetaKind::symplectic})
    CHECK(b2_one_particle(0.0, b) == 1.0);

  CHECK(b2_one_particle(1.5, BetaKind::unitary) == 0.0);
  CHECK(b2_one_particle(0.3, BetaKind::unitary) == doctest::Approx(0.7));

  // - branch continuity at |k| = 1 for the orthogonal case: 1 - 2 + ln 3
  const double inner = b2_one_particle(1.0 - 1e-12, BetaKind::orthogonal);
  const double outer = b2_one_particle(1.0 + 1e-12, BetaKind::orthogonal);
  CHECK(inner == doctest::Approx(kLog3 - 1.0).epsilon(1e-9));
  CHECK(outer == doctest::Approx(kLog3 - 1.0).epsilon(1e-9));
  CHECK(1.0 - b2_one_particle(1.0, BetaKind::orthogonal) ==
        doctest::Approx(2.0 - kLog3).epsilon(1e-12));

  // symplectic support edge and interior singularity
  CHECK(b2_one_particle(2.0, BetaKind::symplectic) == 0.0);
  CHECK(b2_one_particle(1.0, BetaKind::symplectic) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("two-particle form factor") {
  const auto egue = AnalyticModel::egue(10.0);
  CHECK(f2_two_particle(0.05, egue) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(f2_two_particle(0.3, egue) == 1.0);  // chi = 3 beyond the edge

  const auto egoe = AnalyticModel::egoe(1.0);
  const double at_one = (2.0 - kLog3) * (2.0 - kLog3);
  CHECK(f2_two_particle(1.0 - 1e-13, egoe) ==
        doctest::Approx(at_one).epsilon(1e-9));
  CHECK(f2_two_particle(1.0 + 1e-13, egoe) ==
        doctest::Approx(at_one).epsilon(1e-9));
  CHECK(at_one == doctest::Approx(0.81251).epsilon(1e-4));

  const auto egse = AnalyticModel::egse(1.0);
  CHECK(f2_two_particle(2.5, egse) == 1.0);
  CHECK(f2_two_particle(1e9, egse) == 1.0);
  CHECK(std::isinf(f2_two_particle(1.0, egse)));

  // nonnegative everywhere; orthogonal high-chi residual ~ (1/6 chi^2)(1 + 0.108/chi^2)
  for (double chi = 0.01; chi < 12.0; chi += 0.0317) {
    CHECK(f2_two_particle(chi, egoe) >= 0.0);
    CHECK(f2_two_particle(chi, egse) >= 0.0);
    CHECK(f2_two_particle(chi, egue) * 0.0 == 0.0);
    if (chi > 5.0) {
      const double residual = 1.0 - f2_two_particle(chi, egoe);
      CHECK(residual > 0.0);
      CHECK(residual < 1.05 / (6.0 * chi * chi));
    }
  }
}

TEST_CASE("poisson form factor gives exactly linear number variance") {
  auto flat = [](double) { return 1.0; };
  for (double r : {0.5, 3.0, 47.0}) {
    CHECK(sigma2_quadrature(r, flat, {}, 1.0, 1e-12) ==
          doctest::Approx(r).epsilon(1e-10));
  }
}

TEST_CASE("closed form vs quadrature across all three ensembles") {
  const double density = 499.75;
  for (auto kind : {AnalyticModel::Kind::egue, AnalyticModel::Kind::egse,
                    AnalyticModel::Kind::egoe}) {
    AnalyticModel model;
    model.kind = kind;
    model.local_density = density;
    for (int i = 0; i < 20; ++i) {
      const double r =
          0.1 * std::pow(8.0 * density / 0.1, i / 19.0);
      const double closed = sigma2_closed(r, model);
      const double via_ff = sigma2_quadrature(r, model, 1e-9);
      INFO("kind=", to_string(kind), " r=", r, " closed=", closed,
           " quadrature=", via_ff);
      CHECK(std::abs(closed - via_ff) <= 1e-3 * std::abs(via_ff));
    }
  }
}

TEST_CASE("unitary closed form matches quadrature tightly") {
  const auto model = AnalyticModel::egue(499.75);
  for (double r : {1.0, 17.0, 400.0, 4000.0}) {
    const double closed = sigma2_closed(r, model);
    const double via_ff = sigma2_quadrature(r, model, 1e-10);
    CHECK(closed == doctest::Approx(via_ff).epsilon(1e-4));
  }
  // saturation region value: 2/pi^2 * 499.75
  CHECK(sigma2_closed(4000.0, model) ==
        doctest::Approx(2.0 / kPi2 * 499.75).epsilon(0.01));
}

TEST_CASE("small-r expansions") {
  const auto egue = AnalyticModel::egue(499.75);
  CHECK(sigma2_small_r(10.0, egue) ==
        doctest::Approx(10.0 - 4.0 / 3.0 * 100.0 / 499.75).epsilon(1e-12));
  CHECK(sigma2_small_r(10.0, egue) == doctest::Approx(9.7332).epsilon(1e-4));

  const auto egse = AnalyticModel::egse(100.0);
  CHECK(sigma2_small_r(5.0, egse) ==
        doctest::Approx(5.0 - 28.0 / 27.0 * 25.0 / 100.0).epsilon(1e-12));
  CHECK(sigma2_small_r(5.0, egse) == doctest::Approx(4.7407).epsilon(1e-4));

  CHECK(sigma2_small_r(0.0, egue) == 0.0);
}

TEST_CASE("small-r coefficient equals 2 - 2 int b2^2") {
  // Parseval route; for the symplectic case this must reproduce 28/27
  auto b2sq_int = [](BetaKind beta, double edge) {
    auto f = [beta](double k) {
      const double b = b2_one_particle(k, beta);
      return b * b;
    };
    return quad::integrate_finite(f, 0.0, edge, 1e-11, {1.0}).value;
  };
  CHECK(2.0 - 2.0 * b2sq_int(BetaKind::unitary, 1.0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(2.0 - 2.0 * b2sq_int(BetaKind::symplectic, 2.0) ==
        doctest::Approx(28.0 / 27.0).epsilon(1e-8));

  const double c2_goe = small_r_coefficient(BetaKind::orthogonal);
  MESSAGE("orthogonal small-r coefficient c2 = ", c2_goe);
  // c2 = 2 - 2 int b2^2 with 0 < int b2^2 < 1/2
  CHECK(c2_goe > 1.0);
  CHECK(c2_goe < 2.0);
  // independent route: finite head plus transformed tail
  const double head = b2sq_int(BetaKind::orthogonal, 1.0);
  auto b2sq_goe = [](double k) {
    const double b = b2_one_particle(k, BetaKind::orthogonal);
    return b * b;
  };
  const double tail =
      quad::integrate_oscillatory_tail(b2sq_goe, 0.0, 1.0, 1e-12).value;
  CHECK(c2_goe == doctest::Approx(2.0 - 2.0 * (head + tail)).epsilon(1e-9));
}

TEST_CASE("closed form approaches the small-r law like r^3 or faster") {
  for (auto kind : {AnalyticModel::Kind::egue, AnalyticModel::Kind::egse,
                    AnalyticModel::Kind::egoe}) {
    AnalyticModel model;
    model.kind = kind;
    model.local_density = 499.75;
    const double lo = 0.01 * std::sqrt(499.75);
    const double hi = std::sqrt(499.75);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = 0; i < 12; ++i) {
      const double r = lo * std::pow(hi / lo, i / 11.0);
      const double resid =
          std::abs(sigma2_closed(r, model) - sigma2_small_r(r, model));
      if (resid <= 0.0) continue;
      const double x = std::log(r), y = std::log(resid);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    INFO("kind=", to_string(kind), " slope=", slope);
    CHECK(slope >= 2.9);
  }
}

TEST_CASE("saturation constants") {
  CHECK(sigma2_saturation(AnalyticModel::egue(1.0)) ==
        doctest::Approx(0.202642).epsilon(1e-5));
  CHECK(sigma2_saturation(AnalyticModel::egse(1.0)) ==
        doctest::Approx(7.0 / (4.0 * kPi2)).epsilon(1e-12));
  CHECK(sigma2_saturation(AnalyticModel::egoe(1.0)) ==
        doctest::Approx(0.2901).epsilon(2e-4));

  // monotone beta-ordering: orthogonal > unitary > symplectic
  const double s1 = sigma2_saturation(AnalyticModel::egoe(1.0));
  const double s2 = sigma2_saturation(AnalyticModel::egue(1.0));
  const double s4 = sigma2_saturation(AnalyticModel::egse(1.0));
  CHECK(s1 > s2);
  CHECK(s2 > s4);
}

TEST_CASE("saturation constants from the independent frequency integral") {
  for (auto kind : {AnalyticModel::Kind::egue, AnalyticModel::Kind::egse,
                    AnalyticModel::Kind::egoe}) {
    AnalyticModel model;
    model.kind = kind;
    model.local_density = 1.0;
    const double closed = sigma2_saturation(model);
    const double by_quad = sigma2_saturation_quadrature(model);
    INFO("kind=", to_string(kind));
    CHECK(by_quad == doctest::Approx(closed).epsilon(1e-6));
  }
}

TEST_CASE("saturation equals the long-r mean of the closed form") {
  for (auto kind : {AnalyticModel::Kind::egue, AnalyticModel::Kind::egse,
                    AnalyticModel::Kind::egoe}) {
    AnalyticModel model;
    model.kind = kind;
    model.local_density = 499.75;
    double mean = 0.0;
    const int n = 24;
    for (int i = 0; i < n; ++i) {
      const double r = (6.0 + 2.0 * i / (n - 1.0)) * model.local_density;
      mean += sigma2_closed(r, model);
    }
    mean /= n;
    INFO("kind=", to_string(kind));
    CHECK(mean == doctest::Approx(sigma2_saturation(model)).epsilon(0.01));
  }
}

TEST_CASE("cluster function") {
  const double density = 499.75;
  const auto model = AnalyticModel::egue(density);

  // r = 0: (1/R)(2 - int Y2^2) with int sinc^4 = 2/3 by quadrature; the
  // missing |x| > 60 tail is ~1/(4 pi^4 60^3) ~ 1e-8
  const double sinc4 = quad::integrate_finite(
                           [](double x) {
                             if (x == 0.0) return 1.0;
                             const double s = std::sin(kPi * x) / (kPi * x);
                             return s * s * s * s;
                           },
                           -60.0, 60.0, 1e-9)
                           .value;
  CHECK(sinc4 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(y2_two_particle(0.0, model) ==
        doctest::Approx((2.0 - 2.0 / 3.0) / density).epsilon(1e-6));

  // algebraic decay at large separation: well below the r = 0 value
  const double y0 = y2_two_particle(0.0, model);
  CHECK(std::abs(y2_two_particle(50.0 * density, model)) < 1e-3 * y0);
  CHECK(std::abs(y2_two_particle(500.0 * density, model)) <
        std::abs(y2_two_particle(50.5 * density, model)));

  // Fourier route vs direct real-space route on Delta in [0, 5]
  for (int i = 0; i <= 10; ++i) {
    const double delta = 0.5 * i;
    const double r = delta * density;
    const double fourier = y2_two_particle(r, model);
    const double direct = y2_two_particle_direct_egue(r, density);
    CHECK(std::abs(fourier - direct) < 1e-6);
  }
}

TEST_CASE("rigidity transform") {
  // constant Sigma^2 -> Delta3 = c/2 (kernel identity)
  CHECK(delta3_from_sigma2([](double) { return 3.7; }, 10.0, 1e-12) ==
        doctest::Approx(3.7 / 2.0).epsilon(1e-10));
  // Poisson Sigma^2 = s -> r/15
  CHECK(delta3_from_sigma2([](double s) { return s; }, 12.0, 1e-12) ==
        doctest::Approx(12.0 / 15.0).epsilon(1e-8));
  // saturation is half the number-variance saturation
  const auto model = AnalyticModel::egue(499.75);
  CHECK(delta3_saturation(model) ==
        doctest::Approx(0.5 * sigma2_saturation(model)).epsilon(1e-12));
  CHECK(delta3_saturation(model) ==
        doctest::Approx(499.75 / kPi2).epsilon(1e-12));
}

TEST_CASE("poisson cutoff model") {
  const auto model = AnalyticModel::poisson_cutoff(0.1);
  CHECK(sigma2_saturation(model) == doctest::Approx(1.0 / (kPi2 * 0.1)).epsilon(1e-12));
  const double s100 = sigma2_quadrature(100.0, model, 1e-9);
  CHECK(s100 == doctest::Approx(1.0 / (kPi2 * 0.1)).epsilon(0.02));
  // small r stays Poisson-like once r << 1/delta (correction ~ 2 delta r^2)
  const auto narrow = AnalyticModel::poisson_cutoff(0.01);
  CHECK(sigma2_quadrature(0.5, narrow, 1e-10) ==
        doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("gxe cutoff model saturation") {
  for (BetaKind b : {BetaKind::orthogonal, BetaKind::unitary, BetaKind::symplectic}) {
    const auto model = AnalyticModel::gxe_cutoff(0.01, b);
    const double sat = sigma2_saturation(model);
    CHECK(sat > 0.0);
    // saturation from the form-factor integral at visibly large r
    const double far = sigma2_quadrature(2.5e3, model, 1e-8);
    INFO("beta=", static_cast<int>(b), " sat=", sat, " far=", far);
    CHECK(far == doctest::Approx(sat).epsilon(0.02));
  }
}

TEST_CASE("no saturation without a cutoff") {
  CHECK_THROWS_AS(AnalyticModel::poisson_cutoff(0.0), std::invalid_argument);
  CHECK_THROWS_AS(AnalyticModel::gxe_cutoff(-0.1, BetaKind::unitary),
                  std::invalid_argument);
}

TEST_CASE("gaussian reference curves are logarithmic, not saturating") {
  for (BetaKind b : {BetaKind::orthogonal, BetaKind::unitary, BetaKind::symplectic}) {
    const double v5 = gaussian_sigma2(5.0, b);
    const double v50 = gaussian_sigma2(50.0, b);
    const double v500 = gaussian_sigma2(500.0, b);
    INFO("beta=", static_cast<int>(b));
    CHECK(v50 > v5);
    CHECK(v500 > v50);
    // log growth: equal increments per decade, 2/(beta pi^2) ln 10 each
    const double inc1 = v50 - v5;
    const double inc2 = v500 - v50;
    CHECK(inc2 == doctest::Approx(inc1).epsilon(0.05));
    CHECK(inc1 == doctest::Approx(2.0 / (static_cast<int>(b) * kPi2) *
                                  std::log(10.0))
                      .epsilon(0.08));
  }
}

TEST_CASE("egoe sigma term magnitude") {
  const auto model = AnalyticModel::egoe(499.75);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 * std::pow(8.0 * 499.75 / 0.1, i / 19.0);
    const double full = sigma2_closed(r, model);
    const double without = sigma2_closed_egoe_without_sigma(r, model);
    worst = std::max(worst, std::abs(without - full) / full);
  }
  MESSAGE("max relative effect of dropping the sigma term: ", worst);
  CHECK(worst > 0.03);
  CHECK(worst < 0.09);
}
