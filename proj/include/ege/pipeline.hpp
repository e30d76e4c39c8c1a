#pragma once

#include <filesystem>
#include <vector>

#include "ege/curve.hpp"
#include "ege/embedding.hpp"
#include "ege/ensembles.hpp"

// Orchestration: sample one-particle spectra (or load them from the cache),
// build two-particle spectra, unfold, and cut one analysis window per
// realization. Parallel over realizations; results are deterministic in
// (config, plan) regardless of thread count.

namespace ege {

struct WindowPlan {
  double zeta_center = 0.0;
  double half_width = 0.0;  // unfolded units; 0 -> 2 N
};

struct PipelineOptions {
  int threads = 0;  // 0 -> hardware concurrency
  std::filesystem::path cache_dir;
  bool use_cache = false;    // read spectra from cache when present
  bool write_cache = false;  // write sampled spectra back
  int unfolding_grid = 2048;  // empirical-map knots (semicircle mode)
};

/// One window per realization. Uniform density mode uses the closed-form
/// tent unfolding; semicircle mode builds the empirical unfolding map in a
/// first pass over the ensemble and applies it in a second.
std::vector<LevelWindow> generate_windows(const EnsembleConfig& config,
                                          const WindowPlan& plan,
                                          const PipelineOptions& options = {});

/// The ensemble-averaged empirical unfolding map (semicircle mode pass 1).
UnfoldingMap build_empirical_map(const EnsembleConfig& config,
                                 const PipelineOptions& options = {});

/// Populate the spectrum cache for every realization (the `generate`
/// command); returns the number of newly written files.
int populate_cache(const EnsembleConfig& config,
                   const std::filesystem::path& cache_dir, int threads = 0);

/// Mean two-particle level density on a grid (for density exports).
Curve two_particle_density_curve(const EnsembleConfig& config, int bins,
                                 const PipelineOptions& options = {});

}  // namespace ege
