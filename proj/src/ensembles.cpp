#include "ege/ensembles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ege/rng.hpp"

namespace ege {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

double beta_value(BetaKind kind) {
  return static_cast<double>(static_cast<int>(kind));
}

std::string to_string(BetaKind kind) {
  switch (kind) {
    case BetaKind::poisson: return "poisson";
    case BetaKind::orthogonal: return "goe";
    case BetaKind::unitary: return "gue";
    case BetaKind::symplectic: return "gse";
  }
  return "?";
}

std::string to_string(DensityMode mode) {
  return mode == DensityMode::uniform ? "uniform" : "semicircle";
}

void EnsembleConfig::validate() const {
  if (n_levels < 4)
    throw std::invalid_argument("EnsembleConfig: n_levels must be >= 4");
  if (realizations < 1)
    throw std::invalid_argument("EnsembleConfig: realizations must be >= 1");
  if (beta == BetaKind::poisson && density_mode != DensityMode::uniform)
    throw std::invalid_argument(
        "EnsembleConfig: poisson requires uniform density mode");
  if (dense_sampling &&
      (beta == BetaKind::symplectic || beta == BetaKind::poisson))
    throw std::invalid_argument(
        "EnsembleConfig: dense sampling path supports beta = 1, 2 only");
}

std::string EnsembleConfig::content_hash() const {
  const std::string repr = "beta=" + to_string(beta) +
                           ";n=" + std::to_string(n_levels) +
                           ";seed=" + std::to_string(seed) +
                           ";density=" + to_string(density_mode) +
                           ";dense=" + std::to_string(dense_sampling ? 1 : 0);
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

Eigen::ArrayXd eigenvalues_tridiagonal(const EnsembleConfig& config,
                                       int index) {
  const int n = config.n_levels;
  const double beta = beta_value(config.beta);
  Rng rng(config.seed, static_cast<std::uint64_t>(index));

  Eigen::VectorXd diag(n), sub(n - 1);
  const double dscale = std::sqrt(2.0 / beta);
  for (int i = 0; i < n; ++i) diag[i] = dscale * rng.normal();
  for (int i = 0; i < n - 1; ++i)
    sub[i] = rng.chi(beta * static_cast<double>(n - 1 - i)) / std::sqrt(beta);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(
        "sample_raw_spectrum: tridiagonal eigensolver failed on realization " +
        std::to_string(index));
  return solver.eigenvalues().array();
}

Eigen::ArrayXd eigenvalues_dense(const EnsembleConfig& config, int index) {
  const int n = config.n_levels;
  Rng rng(config.seed, static_cast<std::uint64_t>(index));

  if (config.beta == BetaKind::orthogonal) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = std::sqrt(2.0) * rng.normal();
      for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error(
          "sample_raw_spectrum: dense eigensolver failed on realization " +
          std::to_string(index));
    return solver.eigenvalues().array();
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = rng.normal();
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> z(rng.normal() * inv_sqrt2,
                                   rng.normal() * inv_sqrt2);
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(
        "sample_raw_spectrum: dense eigensolver failed on realization " +
        std::to_string(index));
  return solver.eigenvalues().array();
}

}  // namespace

Eigen::ArrayXd sample_raw_spectrum(const EnsembleConfig& config, int index) {
  config.validate();
  if (config.beta == BetaKind::poisson)
    throw std::invalid_argument(
        "sample_raw_spectrum: poisson has no matrix spectrum; use "
        "sample_poisson_spectrum");
  return config.dense_sampling ? eigenvalues_dense(config, index)
                               : eigenvalues_tridiagonal(config, index);
}

double semicircle_cdf_unfold(double x, int n) {
  const double edge = 2.0 * std::sqrt(static_cast<double>(n));
  if (x <= -edge) return -0.5 * n;
  if (x >= edge) return 0.5 * n;
  return x * std::sqrt(4.0 * n - x * x) / (4.0 * kPi) +
         n / kPi * std::asin(x / edge);
}

OneParticleSpectrum unfold_semicircle(const Eigen::ArrayXd& raw, int n) {
  OneParticleSpectrum out;
  const Eigen::Index len = raw.size();
  out.levels.resize(len);
  const double edge = 2.0 * std::sqrt(static_cast<double>(n));
  int clipped = 0;
  for (Eigen::Index i = 0; i < len; ++i) {
    if (i > 0 && !(raw[i] >= raw[i - 1]))
      throw std::invalid_argument("unfold_semicircle: input not sorted");
    double x = raw[i];
    if (x < -edge || x > edge) {
      ++clipped;
      x = std::clamp(x, -edge, edge);
    }
    out.levels[i] = semicircle_cdf_unfold(x, n);
  }
  // clipped duplicates sit exactly on +-N/2: space them by machine-scale
  // steps so the spectrum stays strictly increasing and inside the support
  const double half_n = 0.5 * n;
  const double nudge = static_cast<double>(n) * 0x1.0p-46;
  for (Eigen::Index i = 1; i < len; ++i) {
    if (out.levels[i] > out.levels[i - 1]) continue;
    if (raw[i] == raw[i - 1])
      throw std::runtime_error(
          "unfold_semicircle: degenerate draw (tied eigenvalues)");
    out.levels[i] = out.levels[i - 1] + nudge;
  }
  if (len > 0 && out.levels[len - 1] > half_n) {
    out.levels[len - 1] = half_n;
    for (Eigen::Index i = len - 2; i >= 0; --i) {
      if (out.levels[i] < out.levels[i + 1]) break;
      out.levels[i] = out.levels[i + 1] - nudge;
    }
  }
  out.clipped = clipped;
  return out;
}

OneParticleSpectrum sample_poisson_spectrum(const EnsembleConfig& config,
                                            int index) {
  config.validate();
  if (config.density_mode != DensityMode::uniform)
    throw std::invalid_argument(
        "sample_poisson_spectrum: requires uniform density mode");
  const int n = config.n_levels;
  Rng rng(config.seed, static_cast<std::uint64_t>(index));
  OneParticleSpectrum out;
  out.levels.resize(n);
  const double half = 0.5 * n;
  for (int i = 0; i < n; ++i) out.levels[i] = rng.uniform(-half, half);
  std::sort(out.levels.begin(), out.levels.end());
  out.realization_index = index;
  return out;
}

OneParticleSpectrum sample_one_particle(const EnsembleConfig& config,
                                        int index) {
  config.validate();
  if (config.beta == BetaKind::poisson)
    return sample_poisson_spectrum(config, index);
  Eigen::ArrayXd raw = sample_raw_spectrum(config, index);
  if (config.density_mode == DensityMode::semicircle) {
    OneParticleSpectrum out;
    out.levels = std::move(raw);
    out.realization_index = index;
    return out;
  }
  OneParticleSpectrum out = unfold_semicircle(raw, config.n_levels);
  out.realization_index = index;
  return out;
}

}  // namespace ege
