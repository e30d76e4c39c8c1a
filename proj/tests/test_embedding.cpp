#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ege/analytic.hpp"
#include "ege/embedding.hpp"
#include "ege/ensembles.hpp"
#include "oracles.hpp"

using namespace ege;

namespace {

OneParticleSpectrum spectrum_from(std::initializer_list<double> levels) {
  OneParticleSpectrum sp;
  sp.levels.resize(static_cast<Eigen::Index>(levels.size()));
  Eigen::Index i = 0;
  for (double v : levels) sp.levels[i++] = v;
  return sp;
}

// exact integral of the tent density N/2 - |xi|/2 - 1/4 over [lo, hi]
double quad_tent_integral(double lo, double hi, int n) {
  return (0.5 * n - 0.25) * (hi - lo) -
         (hi * std::abs(hi) - lo * std::abs(lo)) / 4.0;
}

}  // namespace

TEST_CASE("pairwise sums") {
  const auto tp3 = two_particle_levels(spectrum_from({0.0, 1.0, 2.0}));
  REQUIRE(tp3.levels.size() == 3);
  CHECK(tp3.levels[0] == 1.0);
  CHECK(tp3.levels[1] == 2.0);
  CHECK(tp3.levels[2] == 3.0);

  const auto tp4 =
      two_particle_levels(spectrum_from({-1.5, -0.5, 0.5, 1.5}));
  REQUIRE(tp4.levels.size() == 6);
  const double expect[6] = {-2.0, -1.0, 0.0, 0.0, 1.0, 2.0};
  for (int i = 0; i < 6; ++i) CHECK(tp4.levels[i] == expect[i]);

  CHECK_THROWS_AS(two_particle_levels(spectrum_from({1.0})),
                  std::invalid_argument);
}

TEST_CASE("pairwise sum bounds and count") {
  EnsembleConfig config;
  config.beta = BetaKind::poisson;
  config.n_levels = 64;
  config.realizations = 1;
  config.seed = 5;
  const auto sp = sample_poisson_spectrum(config, 0);
  const auto tp = two_particle_levels(sp);
  CHECK(tp.levels.size() == 64 * 63 / 2);
  CHECK(tp.levels[0] >= sp.levels[0] + sp.levels[1]);
  CHECK(tp.levels[tp.levels.size() - 1] <=
        sp.levels[62] + sp.levels[63]);
  for (Eigen::Index i = 1; i < tp.levels.size(); ++i)
    CHECK(tp.levels[i] >= tp.levels[i - 1]);
}

TEST_CASE("tent density values") {
  CHECK(tent_density(0.0, 1000) == 499.75);
  CHECK(tent_density(105.6, 1000) == doctest::Approx(446.95).epsilon(1e-12));
  CHECK(tent_density(1000.0, 1000) == 0.0);
  CHECK(tent_density(-1000.0, 1000) == 0.0);
  CHECK(tent_density(1500.0, 1000) == 0.0);
}

TEST_CASE("tent unfolding map") {
  CHECK(unfold_tent(0.0, 1000) == 0.0);
  CHECK(unfold_tent(3.0, 1000) == doctest::Approx(1497.75).epsilon(1e-14));
  CHECK(unfold_tent(225.5, 1000) ==
        doctest::Approx(100037.4375).epsilon(1e-14));
  CHECK(unfold_tent(-3.0, 1000) == -unfold_tent(3.0, 1000));
  CHECK_THROWS_AS(unfold_tent(1001.0, 1000), std::domain_error);

  // strictly increasing; derivative equals the tent with the 1/4 term dropped
  oracles::Rand rng(4);
  for (int i = 0; i < 200; ++i) {
    const double xi = rng.uniform(-950.0, 950.0);
    const double h = 1e-4;
    const double fd =
        (unfold_tent(xi + h, 1000) - unfold_tent(xi - h, 1000)) / (2.0 * h);
    const double rho = tent_density(xi, 1000);
    CHECK(fd == doctest::Approx(rho + 0.25).epsilon(1e-6));
    CHECK(std::abs(fd - rho) / rho <= 1.0 / (2.0 * rho) + 1e-9);
  }
}

TEST_CASE("tent inversion") {
  CHECK(invert_unfold_tent(0.0, 1000) == 0.0);
  CHECK(invert_unfold_tent(50000.0, 1000) ==
        doctest::Approx(105.57).epsilon(1e-4));
  CHECK_THROWS_AS(invert_unfold_tent(250001.0, 1000), std::domain_error);

  oracles::Rand rng(9);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double xi = rng.uniform(-999.0, 999.0);
    const double back = invert_unfold_tent(unfold_tent(xi, 1000), 1000);
    worst = std::max(worst, std::abs(back - xi));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("window extraction") {
  EnsembleConfig config;
  config.beta = BetaKind::poisson;
  config.n_levels = 1000;
  config.realizations = 50;
  config.seed = 99;

  SUBCASE("center window holds ~2w levels") {
    double mean_count = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto tp = two_particle_levels(sample_poisson_spectrum(config, i));
      const auto w = extract_window(tp, 0.0, 10.0, 1000);
      CHECK(w.local_density == 499.75);
      CHECK(w.levels.minCoeff() >= -10.0);
      CHECK(w.levels.maxCoeff() <= 10.0);
      mean_count += static_cast<double>(w.levels.size());
    }
    mean_count /= 50;
    CHECK(mean_count == doctest::Approx(20.0).epsilon(0.10));
  }

  SUBCASE("degenerate and out-of-range windows") {
    const auto tp = two_particle_levels(sample_poisson_spectrum(config, 0));
    CHECK_THROWS_AS(extract_window(tp, 0.0, 0.0, 1000), std::invalid_argument);
    CHECK_THROWS_AS(extract_window(tp, 249000.0, 2000.0, 1000), WindowError);
  }

  SUBCASE("density variation guard") {
    const auto tp = two_particle_levels(sample_poisson_spectrum(config, 0));
    const auto w = extract_window(tp, 50000.0, 2000.0, 1000);
    CHECK(w.xi_center == doctest::Approx(105.57).epsilon(1e-4));
    CHECK(w.local_density == doctest::Approx(446.96).epsilon(1e-4));
    // the tent density changes by < 2% across this window
    const double lo = tent_density(invert_unfold_tent(48000.0, 1000), 1000);
    const double hi = tent_density(invert_unfold_tent(52000.0, 1000), 1000);
    CHECK(std::abs(hi - lo) / w.local_density < 0.02);
    // far down the flank the same width violates the 2% cap
    CHECK_THROWS_AS(extract_window(tp, 230000.0, 2000.0, 1000), WindowError);
  }
}

TEST_CASE("empirical unfolding reproduces the closed-form tent map") {
  // synthetic levels drawn by rejection from the exact triangle (N - |xi|)/2,
  // whose cumulative is unfold_tent with total mass N^2/2
  const int n = 200;
  oracles::Rand rng(1234);
  std::vector<TwoParticleSpectrum> spectra;
  const int reals = 350;
  const int per_real = 12000;
  for (int r = 0; r < reals; ++r) {
    std::vector<double> lv;
    lv.reserve(per_real);
    while (static_cast<int>(lv.size()) < per_real) {
      const double xi = rng.uniform(-n, n);
      const double u = rng.uniform(0.0, 0.5 * n);
      if (u < 0.5 * (n - std::abs(xi))) lv.push_back(xi);
    }
    std::sort(lv.begin(), lv.end());
    TwoParticleSpectrum tp;
    tp.levels = Eigen::Map<Eigen::ArrayXd>(lv.data(), lv.size());
    tp.realization_index = r;
    spectra.push_back(std::move(tp));
  }
  const UnfoldingMap map = unfold_empirical(spectra, 1024);

  // compare against the closed form, rescaled to the synthetic level count
  const double scale = per_real / (0.5 * n * n);
  for (double xi : {-150.0, -80.0, -30.0, 30.0, 75.0, 140.0}) {
    const double expect = unfold_tent(xi, n) * scale;
    const double got = map(xi);
    CHECK(std::abs(got - expect) < 0.005 * std::abs(expect));
  }
}

TEST_CASE("empirical unfolding of constant density is affine") {
  oracles::Rand rng(555);
  std::vector<TwoParticleSpectrum> spectra;
  for (int r = 0; r < 60; ++r) {
    std::vector<double> lv(4000);
    for (auto& v : lv) v = rng.uniform(-50.0, 50.0);
    std::sort(lv.begin(), lv.end());
    TwoParticleSpectrum tp;
    tp.levels = Eigen::Map<Eigen::ArrayXd>(lv.data(), lv.size());
    spectra.push_back(std::move(tp));
  }
  const UnfoldingMap map = unfold_empirical(spectra, 512);
  // map values are affine in xi (identity up to scale and shift); the
  // pointwise derivative of the interpolant is noisy at the knot scale, so
  // check values against the secant fit
  const double a = (map(45.0) - map(-45.0)) / 90.0;
  const double b = map(0.0);
  CHECK(a == doctest::Approx(4000.0 / 100.0).epsilon(0.01));
  for (double xi = -45.0; xi <= 45.0; xi += 7.5) {
    const double se_scale = std::sqrt(4000.0 * 0.25 / 60.0);  // staircase noise
    CHECK(std::abs(map(xi) - (a * xi + b)) < 5.0 * se_scale);
  }
}

TEST_CASE("empirical unfolding needs enough realizations") {
  EmpiricalUnfoldingBuilder builder(-1.0, 1.0, 64);
  TwoParticleSpectrum tp;
  tp.levels = Eigen::ArrayXd::LinSpaced(100, -0.99, 0.99);
  for (int i = 0; i < 10; ++i) builder.add(tp);
  CHECK_THROWS_AS(builder.build(), std::runtime_error);
}

TEST_CASE("semicircle-input windows have unit mean spacing") {
  EnsembleConfig config;
  config.beta = BetaKind::unitary;
  config.n_levels = 100;
  config.realizations = 250;
  config.seed = 21;
  config.density_mode = DensityMode::semicircle;

  EmpiricalUnfoldingBuilder builder(-4.0 * std::sqrt(100.0),
                                    4.0 * std::sqrt(100.0), 2048);
  std::vector<TwoParticleSpectrum> spectra;
  for (int i = 0; i < config.realizations; ++i) {
    spectra.push_back(two_particle_levels(sample_one_particle(config, i)));
    builder.add(spectra.back());
  }
  const UnfoldingMap map = builder.build();

  double sum = 0.0;
  long count = 0;
  for (const auto& tp : spectra) {
    const auto w = extract_window_mapped(tp, map, 0.0, 300.0);
    for (Eigen::Index j = 1; j < w.levels.size(); ++j) {
      sum += w.levels[j] - w.levels[j - 1];
      ++count;
    }
  }
  CHECK(sum / count == doctest::Approx(1.0).epsilon(0.01));
}

// Exhaustive small-N oracle for the two-particle density. For i.i.d. input
// the exact mean density is (1 - 1/N) times the self-convolution of the
// uniform density, i.e. (N - |xi|)/2 - (N - |xi|)/(2N): the tail term is
// level-repulsion dependent, and only Gaussian-ensemble input reproduces the
// -1/4 form. Both are validated binwise at 3 sigma.
TEST_CASE("two-particle density oracle, poisson input") {
  EnsembleConfig config;
  config.beta = BetaKind::poisson;
  config.n_levels = 40;
  config.realizations = 4000;
  config.seed = 1010;

  const int bins = 20;
  const double span = 40.0;
  const double width = 2.0 * span / bins;
  std::vector<double> sum(bins, 0.0), sumsq(bins, 0.0);
  for (int i = 0; i < config.realizations; ++i) {
    const auto tp = two_particle_levels(sample_poisson_spectrum(config, i));
    std::vector<int> c(bins, 0);
    for (double x : tp.levels) {
      const int b = static_cast<int>((x + span) / width);
      if (b >= 0 && b < bins) ++c[b];
    }
    for (int b = 0; b < bins; ++b) {
      sum[b] += c[b];
      sumsq[b] += static_cast<double>(c[b]) * c[b];
    }
  }
  const double n = 40.0;
  for (int b = 0; b < bins; ++b) {
    const double mid = -span + (b + 0.5) * width;
    // exact iid expectation integrated over the bin
    auto iid_density = [n](double xi) {
      const double conv = std::max(n - std::abs(xi), 0.0);
      return 0.5 * conv * (1.0 - 1.0 / n);
    };
    const double expect =
        width * 0.5 * (iid_density(mid - 0.25 * width) +
                       iid_density(mid + 0.25 * width));
    const double mean = sum[b] / config.realizations;
    const double se = std::sqrt(
        (sumsq[b] / config.realizations - mean * mean) / config.realizations);
    INFO("bin ", b, " mid ", mid, " mean ", mean, " expect ", expect);
    CHECK(std::abs(mean - expect) < 3.5 * se + 1e-9);
  }
}

TEST_CASE("two-particle density oracle, unitary input matches the tent") {
  EnsembleConfig config;
  config.beta = BetaKind::unitary;
  config.n_levels = 60;
  config.realizations = 3000;
  config.seed = 2020;

  const int bins = 15;
  const double span = 30.0;  // stay away from the support edges
  const double width = 2.0 * span / bins;
  std::vector<double> sum(bins, 0.0), sumsq(bins, 0.0);
  for (int i = 0; i < config.realizations; ++i) {
    const auto tp = two_particle_levels(sample_one_particle(config, i));
    std::vector<int> c(bins, 0);
    for (double x : tp.levels) {
      const double pos = (x + span) / width;
      if (pos < 0.0) continue;
      const int b = static_cast<int>(pos);
      if (b < bins) ++c[b];
    }
    for (int b = 0; b < bins; ++b) {
      sum[b] += c[b];
      sumsq[b] += static_cast<double>(c[b]) * c[b];
    }
  }
  for (int b = 0; b < bins; ++b) {
    const double lo = -span + b * width;
    const double expect =
        quad_tent_integral(lo, lo + width, config.n_levels);
    const double mean = sum[b] / config.realizations;
    const double se = std::sqrt(
        (sumsq[b] / config.realizations - mean * mean) / config.realizations);
    INFO("bin ", b, " mean ", mean, " expect ", expect, " se ", se);
    CHECK(std::abs(mean - expect) < 3.5 * se + 1e-9);
  }
}

// Pair-separation oracle for the two-particle cluster function: the expected
// number of ordered level pairs per window with separation in [u, u+du) is
// rho0^2 (W - u)(1 - Y2^(2)(u rho0)) du, which pins both the scale and the
// flat ~2/R dip predicted for separations of order one. rho0 is the true
// unfolded density R/(R + 1/4) left by the dropped tail term of the
// unfolding map.
TEST_CASE("cluster function oracle, unitary input") {
  EnsembleConfig config;
  config.beta = BetaKind::unitary;
  config.n_levels = 60;
  config.realizations = 4000;
  config.seed = 3030;

  const double w = 25.0;  // window half-width in unfolded units
  const int bins = 6;
  const double r_max = 3.0;
  const double dr = r_max / bins;

  std::vector<double> sum(bins, 0.0), sumsq(bins, 0.0);
  for (int i = 0; i < config.realizations; ++i) {
    const auto tp = two_particle_levels(sample_one_particle(config, i));
    const auto win = extract_window(tp, 0.0, w, config.n_levels);
    std::vector<int> c(bins, 0);
    const Eigen::Index m = win.levels.size();
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a + 1; b < m; ++b) {
        const double u = win.levels[b] - win.levels[a];
        if (u >= r_max) break;
        ++c[static_cast<int>(u / dr)];
      }
    for (int b = 0; b < bins; ++b) {
      sum[b] += c[b];
      sumsq[b] += static_cast<double>(c[b]) * c[b];
    }
  }

  const double rho_tent = tent_density(0.0, config.n_levels);
  const double rho0 = rho_tent / (rho_tent + 0.25);
  const auto model = ege::analytic::AnalyticModel::egue(rho_tent);
  for (int b = 0; b < bins; ++b) {
    const double u0 = b * dr, u1 = u0 + dr;
    // integrate rho0^2 (W - u)(1 - Y(u rho0)) over the bin with a 5-point rule
    double expect = 0.0;
    for (int q = 0; q < 5; ++q) {
      const double u = u0 + (q + 0.5) * dr / 5.0;
      expect += rho0 * rho0 * (2.0 * w - u) *
                (1.0 - ege::analytic::y2_two_particle(u * rho0, model)) * dr /
                5.0;
    }
    const double mean = sum[b] / config.realizations;
    const double se = std::sqrt(
        (sumsq[b] / config.realizations - mean * mean) / config.realizations);
    INFO("bin ", b, " mean ", mean, " expect ", expect, " se ", se);
    CHECK(std::abs(mean - expect) < 3.5 * se);
    // the measured dip must also be distinguishable from "no correlation"
    const double uncorrelated = (2.0 * w - 0.5 * (u0 + u1)) * dr;
    CHECK(mean < uncorrelated);
  }
}
