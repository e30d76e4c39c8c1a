#pragma once

#include <Eigen/Core>
#include <span>

#include "ege/ensembles.hpp"

// Two-particle spectra of non-interacting pairs: pairwise sums of
// one-particle levels, the triangular mean density they produce, the
// closed-form unfolding map for uniform input, empirical unfolding for
// non-uniform input, and local analysis windows on the unfolded scale.

namespace ege {

struct TwoParticleSpectrum {
  Eigen::ArrayXd levels;  // sorted, length N(N-1)/2
  int realization_index = 0;
};

class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All pairwise sums e_i + e_j (i < j), sorted. Throws std::invalid_argument
/// for fewer than two levels.
TwoParticleSpectrum two_particle_levels(const OneParticleSpectrum& sp);

/// Mean two-particle density N/2 - |xi|/2 - 1/4 on [-N, N] (clamped to 0
/// where the tail term drives it negative), 0 outside.
double tent_density(double xi, int n);

/// Unfolded coordinate zeta(xi) = (N/2) xi - sign(xi) xi^2/4 (the -1/4 tail
/// term is dropped here, matching the map used to build unit mean density).
/// Strictly increasing and odd on [-N, N]; throws std::domain_error outside.
double unfold_tent(double xi, int n);

/// Inverse of unfold_tent on |zeta| <= N^2/4.
double invert_unfold_tent(double zeta, int n);

struct LevelWindow {
  double zeta_center = 0.0;
  double xi_center = 0.0;
  double local_density = 1.0;  // R1^(2) at the window center
  double half_width = 0.0;     // unfolded units
  Eigen::ArrayXd levels;       // unfolded, recentred to zeta_center = 0, sorted
  int realization_index = 0;
};

/// Unfold a two-particle spectrum with the closed-form tent map and cut the
/// slice [zeta_center - w, zeta_center + w], recentred. Throws WindowError
/// when the window reaches the unfolded support edge or when the tent density
/// varies by more than 2% across it; std::invalid_argument for w <= 0.
LevelWindow extract_window(const TwoParticleSpectrum& tp, double zeta_center,
                           double half_width, int n);

/// Monotone map xi -> zeta built from an ensemble-averaged cumulative level
/// count (piecewise-cubic monotone interpolation between knots).
class UnfoldingMap {
 public:
  UnfoldingMap() = default;
  UnfoldingMap(Eigen::ArrayXd xi_knots, Eigen::ArrayXd zeta_knots);

  double operator()(double xi) const;
  double derivative(double xi) const;  // local density in xi
  double inverse(double zeta) const;

  double xi_min() const { return x_[0]; }
  double xi_max() const { return x_[x_.size() - 1]; }
  double zeta_min() const { return y_[0]; }
  double zeta_max() const { return y_[y_.size() - 1]; }

  const Eigen::ArrayXd& xi_knots() const { return x_; }
  const Eigen::ArrayXd& zeta_knots() const { return y_; }

 private:
  Eigen::ArrayXd x_, y_, m_;  // knots and Fritsch-Carlson slopes
};

/// Streaming builder for the empirical unfolding map: accumulates the
/// cumulative level count on a fixed xi grid over realizations.
class EmpiricalUnfoldingBuilder {
 public:
  EmpiricalUnfoldingBuilder(double xi_min, double xi_max, int grid_size = 2048);
  void add(const TwoParticleSpectrum& tp);
  void merge(const EmpiricalUnfoldingBuilder& other);
  int spectra_seen() const { return count_; }
  /// Requires >= 50 accumulated spectra; throws std::runtime_error otherwise
  /// or if the averaged staircase fails to be monotone.
  UnfoldingMap build() const;

 private:
  Eigen::ArrayXd knots_;
  Eigen::ArrayXd cumulative_;
  int count_ = 0;
};

UnfoldingMap unfold_empirical(std::span<const TwoParticleSpectrum> spectra,
                              int grid_size = 2048);

/// Window extraction through an empirical map; local density comes from the
/// map derivative at the window center.
LevelWindow extract_window_mapped(const TwoParticleSpectrum& tp,
                                  const UnfoldingMap& map, double zeta_center,
                                  double half_width);

}  // namespace ege
