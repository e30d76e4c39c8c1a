#pragma once

#include <Eigen/Core>
#include <span>

#include "ege/curve.hpp"
#include "ege/embedding.hpp"

// Monte-Carlo estimators over ensembles of LevelWindows: two-point form
// factor in Fourier space, number variance of centered interval counts, and
// kth-nearest spacing histograms. Error bars are delete-one jackknife over
// realizations.

namespace ege {

struct FormFactorEstimate {
  Curve curve;        // abscissa k, value F, stderr
  double mean_count = 0.0;  // n-bar, the normalization
};

/// Connected Fourier-amplitude variance per mean window count:
///   F(k) = Var_w[ sum_j exp(2 pi i k zeta_j) ] / n-bar,
/// the Bessel-corrected sample variance over windows, which leaves the
/// estimator unbiased and makes F -> 1 exactly in the k -> inf
/// self-correlation limit. A single window (no variance to subtract)
/// degenerates to |sum|^2 / n-bar.
FormFactorEstimate form_factor_estimate(std::span<const LevelWindow> windows,
                                        const Eigen::ArrayXd& k_grid);

struct NumberVarianceOptions {
  // Average the count variance over interval offsets within
  // +-offset_span of the window center (variance reduction for small r;
  // biased if the density drifts across the span, so off by default).
  bool offset_averaging = false;
  double offset_span = 0.0;  // 0 -> half_width / 2
  int n_offsets = 33;        // symmetric grid including the center
};

struct NumberVarianceEstimate {
  Curve curve;  // abscissa r, value Sigma^2, stderr
  double zeta_center = 0.0;
  double local_density = 0.0;
};

/// Ensemble variance of the number of levels in the centered half-open
/// interval [-r/2, r/2) per window. Throws std::invalid_argument when the
/// r grid (plus offsets) does not fit inside the windows.
NumberVarianceEstimate number_variance_estimate(
    std::span<const LevelWindow> windows, const Eigen::ArrayXd& r_grid,
    const NumberVarianceOptions& options = {});

struct SpacingHistogram {
  int order = 0;             // k: number of levels between the pair
  Eigen::ArrayXd bin_edges;  // size bins + 1
  Eigen::ArrayXd density;    // normalized over the binned range
  std::vector<long> counts;
  double mean_spacing = 0.0;  // over all pooled spacings, including overflow
  long total_in_range = 0;
  long total_pooled = 0;

  Curve as_curve() const;  // bin centers vs density
};

/// Histogram of s = zeta_{j+k+1} - zeta_j pooled over windows.
SpacingHistogram spacing_histogram(std::span<const LevelWindow> windows,
                                   int order, int bins, double s_max = 8.0);

/// Reference kth-nearest Poisson spacing density s^k e^{-s} / k!.
double poisson_pk(double s, int k);

}  // namespace ege
