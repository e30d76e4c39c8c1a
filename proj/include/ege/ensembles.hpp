#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

// One-particle spectra: Gaussian beta-ensemble draws (beta = 1, 2, 4) on the
// semicircle scale, Poisson (i.i.d. uniform) baselines, and analytic
// semicircle unfolding onto [-N/2, N/2] with unit mean density.

namespace ege {

enum class BetaKind : int {
  poisson = 0,
  orthogonal = 1,
  unitary = 2,
  symplectic = 4,
};

enum class DensityMode { uniform, semicircle };

double beta_value(BetaKind kind);
std::string to_string(BetaKind kind);
std::string to_string(DensityMode mode);

struct EnsembleConfig {
  BetaKind beta = BetaKind::unitary;
  int n_levels = 1000;
  int realizations = 1;
  std::uint64_t seed = 0;
  DensityMode density_mode = DensityMode::uniform;
  bool dense_sampling = false;  // dense-matrix cross-check path (beta 1, 2)

  void validate() const;          // throws std::invalid_argument
  std::string content_hash() const;  // 16-hex cache key
};

struct OneParticleSpectrum {
  Eigen::ArrayXd levels;  // strictly increasing
  int realization_index = 0;
  int clipped = 0;  // outliers clipped to the support edge during unfolding
};

/// Eigenvalues of one N-dimensional Gaussian beta-ensemble draw, scaled so
/// the mean density is the semicircle (1/2pi) sqrt(4N - x^2), sorted
/// ascending. Deterministic in (config.seed, index). Sampled through the
/// tridiagonal beta-ensemble model by default; config.dense_sampling selects
/// the dense-matrix route for beta = 1, 2.
Eigen::ArrayXd sample_raw_spectrum(const EnsembleConfig& config, int index);

/// Closed-form integrated semicircle density mapped to [-N/2, N/2]:
/// x -> N F(x) - N/2 with F the semicircle CDF on [-2 sqrt(N), 2 sqrt(N)].
double semicircle_cdf_unfold(double x, int n);

/// Unfold a raw semicircle-scale spectrum to unit density on [-N/2, N/2].
/// Values beyond +-2 sqrt(N) are clipped to the edge (count recorded in the
/// result); clipped duplicates are spaced by machine-scale offsets so the
/// spectrum stays strictly increasing.
OneParticleSpectrum unfold_semicircle(const Eigen::ArrayXd& raw, int n);

/// N i.i.d. uniform levels on [-N/2, N/2], sorted.
OneParticleSpectrum sample_poisson_spectrum(const EnsembleConfig& config,
                                            int index);

/// Density-mode dispatch: uniform Gaussian input is sampled and unfolded;
/// Poisson is sampled directly; semicircle mode returns the raw spectrum
/// (two-particle empirical unfolding happens downstream).
OneParticleSpectrum sample_one_particle(const EnsembleConfig& config,
                                        int index);

}  // namespace ege
