#pragma once

#include <Eigen/Core>
#include <filesystem>

#include "ege/ensembles.hpp"

// Spectrum cache: one binary file per realization under
// <dir>/<config-hash>/spec_<index>.bin holding the raw sampled levels.
//
// Layout (little-endian):
//   char[8]  magic "EGESPC01"
//   u32      beta (0 poisson, 1/2/4 Gaussian)
//   u32      n_levels
//   u64      seed
//   u32      realization index
//   u32      density mode (0 uniform, 1 semicircle)
//   f64[n]   levels, sorted

namespace ege::cache {

std::filesystem::path spectrum_path(const std::filesystem::path& dir,
                                    const EnsembleConfig& config, int index);

void write_spectrum(const std::filesystem::path& dir,
                    const EnsembleConfig& config, int index,
                    const Eigen::ArrayXd& levels);

/// Returns false when the file does not exist; throws std::runtime_error on
/// a corrupt or mismatching file.
bool read_spectrum(const std::filesystem::path& dir,
                   const EnsembleConfig& config, int index,
                   Eigen::ArrayXd& out);

}  // namespace ege::cache
