#include "ege/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "ege/cache.hpp"
#include "ege/curve.hpp"

namespace ege {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// run fn(index) for index in [0, count) on a worker pool; exceptions are
// rethrown on the caller thread
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::min(resolve_threads(threads), std::max(count, 1));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

OneParticleSpectrum load_one_particle(const EnsembleConfig& config, int index,
                                      const PipelineOptions& options) {
  if (options.use_cache && !options.cache_dir.empty() &&
      config.beta != BetaKind::poisson) {
    Eigen::ArrayXd raw;
    if (cache::read_spectrum(options.cache_dir, config, index, raw)) {
      if (config.density_mode == DensityMode::semicircle) {
        OneParticleSpectrum sp;
        sp.levels = std::move(raw);
        sp.realization_index = index;
        return sp;
      }
      OneParticleSpectrum sp = unfold_semicircle(raw, config.n_levels);
      sp.realization_index = index;
      return sp;
    }
  }
  if (options.write_cache && !options.cache_dir.empty() &&
      config.beta != BetaKind::poisson) {
    Eigen::ArrayXd raw = sample_raw_spectrum(config, index);
    cache::write_spectrum(options.cache_dir, config, index, raw);
    if (config.density_mode == DensityMode::semicircle) {
      OneParticleSpectrum sp;
      sp.levels = std::move(raw);
      sp.realization_index = index;
      return sp;
    }
    OneParticleSpectrum sp = unfold_semicircle(raw, config.n_levels);
    sp.realization_index = index;
    return sp;
  }
  return sample_one_particle(config, index);
}

}  // namespace

UnfoldingMap build_empirical_map(const EnsembleConfig& config,
                                 const PipelineOptions& options) {
  config.validate();
  const int n = config.n_levels;
  // two-particle support for semicircle-scale input is [-4 sqrt(N), 4 sqrt(N)]
  // up to edge fluctuations of the extreme eigenvalues; pad so no level ever
  // falls off the cumulative-count grid
  const double span = 1.05 * (config.density_mode == DensityMode::semicircle
                                  ? 4.0 * std::sqrt(static_cast<double>(n))
                                  : static_cast<double>(n));

  const int threads = resolve_threads(options.threads);
  std::vector<EmpiricalUnfoldingBuilder> parts(
      threads,
      EmpiricalUnfoldingBuilder(-span, span, options.unfolding_grid));
  std::atomic<int> slot{0};
  // cumulative counts are integer-valued doubles, so merging is exact and
  // thread-schedule independent
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    const int s = slot.fetch_add(1);
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.realizations) return;
      try {
        const OneParticleSpectrum sp = load_one_particle(config, i, options);
        parts[s].add(two_particle_levels(sp));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int nthreads = std::min(threads, std::max(config.realizations, 1));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  EmpiricalUnfoldingBuilder total = std::move(parts[0]);
  for (int t = 1; t < nthreads; ++t) total.merge(parts[t]);
  return total.build();
}

std::vector<LevelWindow> generate_windows(const EnsembleConfig& config,
                                          const WindowPlan& plan,
                                          const PipelineOptions& options) {
  config.validate();
  const double half_width =
      plan.half_width > 0.0 ? plan.half_width : 2.0 * config.n_levels;

  UnfoldingMap map;
  const bool empirical = config.density_mode == DensityMode::semicircle;
  if (empirical) map = build_empirical_map(config, options);

  std::vector<LevelWindow> windows(config.realizations);
  parallel_for(config.realizations, options.threads, [&](int i) {
    const OneParticleSpectrum sp = load_one_particle(config, i, options);
    const TwoParticleSpectrum tp = two_particle_levels(sp);
    windows[i] = empirical
                     ? extract_window_mapped(tp, map, plan.zeta_center,
                                             half_width)
                     : extract_window(tp, plan.zeta_center, half_width,
                                      config.n_levels);
  });
  return windows;
}

int populate_cache(const EnsembleConfig& config,
                   const std::filesystem::path& cache_dir, int threads) {
  config.validate();
  if (config.beta == BetaKind::poisson)
    throw std::invalid_argument(
        "populate_cache: poisson spectra are cheaper to redraw than to cache");
  std::atomic<int> written{0};
  parallel_for(config.realizations, threads, [&](int i) {
    Eigen::ArrayXd existing;
    if (cache::read_spectrum(cache_dir, config, i, existing)) return;
    cache::write_spectrum(cache_dir, config, i,
                          sample_raw_spectrum(config, i));
    written.fetch_add(1);
  });
  return written.load();
}

Curve two_particle_density_curve(const EnsembleConfig& config, int bins,
                                 const PipelineOptions& options) {
  config.validate();
  if (bins < 4) throw std::invalid_argument("density curve: bins < 4");
  const int n = config.n_levels;
  const double span = config.density_mode == DensityMode::semicircle
                          ? 4.0 * std::sqrt(static_cast<double>(n))
                          : static_cast<double>(n);
  const int threads = resolve_threads(options.threads);
  std::vector<std::vector<long>> counts(threads, std::vector<long>(bins, 0));

  std::atomic<int> slot{0}, next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  auto worker = [&] {
    const int s = slot.fetch_add(1);
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.realizations) return;
      try {
        const TwoParticleSpectrum tp =
            two_particle_levels(load_one_particle(config, i, options));
        for (double x : tp.levels) {
          const double pos = (x + span) / (2.0 * span) * bins;
          if (pos < 0.0) continue;  // int truncation would fold into bin 0
          const int b = static_cast<int>(pos);
          if (b < bins) ++counts[s][b];
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int nthreads = std::min(threads, std::max(config.realizations, 1));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  Curve curve;
  curve.kind = CurveKind::density;
  curve.abscissa.resize(bins);
  curve.values.resize(bins);
  curve.stderrs = Eigen::ArrayXd::Zero(bins);
  const double width = 2.0 * span / bins;
  for (int b = 0; b < bins; ++b) {
    long c = 0;
    for (int t = 0; t < nthreads; ++t) c += counts[t][b];
    curve.abscissa[b] = -span + (b + 0.5) * width;
    curve.values[b] =
        static_cast<double>(c) / (config.realizations * width);
    curve.stderrs[b] = std::sqrt(static_cast<double>(c)) /
                       (config.realizations * width);
  }
  return curve;
}

}  // namespace ege
