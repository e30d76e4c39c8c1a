#include "ege/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace ege {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676656;

double jackknife_stderr(const std::vector<double>& leave_one_out) {
  const std::size_t n = leave_one_out.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : leave_one_out) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : leave_one_out) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

FormFactorEstimate form_factor_estimate(std::span<const LevelWindow> windows,
                                        const Eigen::ArrayXd& k_grid) {
  if (windows.empty())
    throw std::invalid_argument("form_factor_estimate: no windows");
  for (Eigen::Index i = 0; i < k_grid.size(); ++i)
    if (!(k_grid[i] > 0.0))
      throw std::invalid_argument("form_factor_estimate: k grid must be > 0");

  const std::size_t nw = windows.size();
  const Eigen::Index nk = k_grid.size();

  double nbar = 0.0;
  for (const auto& w : windows) {
    if (w.levels.size() == 0)
      throw std::invalid_argument("form_factor_estimate: empty window");
    nbar += static_cast<double>(w.levels.size());
  }
  nbar /= static_cast<double>(nw);

  // per-window Fourier sums
  std::vector<std::vector<std::complex<double>>> sums(
      nw, std::vector<std::complex<double>>(nk));
  for (std::size_t i = 0; i < nw; ++i) {
    const auto& lv = windows[i].levels;
    for (Eigen::Index m = 0; m < nk; ++m) {
      const double k = k_grid[m];
      double re = 0.0, im = 0.0;
      for (Eigen::Index j = 0; j < lv.size(); ++j) {
        const double phase = kTwoPi * k * lv[j];
        re += std::cos(phase);
        im += std::sin(phase);
      }
      sums[i][m] = {re, im};
    }
  }

  FormFactorEstimate out;
  out.mean_count = nbar;
  out.curve.kind = CurveKind::form_factor;
  out.curve.abscissa = k_grid;
  out.curve.values.resize(nk);
  out.curve.stderrs = Eigen::ArrayXd::Zero(nk);

  if (nw == 1) {
    for (Eigen::Index m = 0; m < nk; ++m)
      out.curve.values[m] = std::norm(sums[0][m]) / nbar;
    return out;
  }

  std::vector<double> loo(nw);
  for (Eigen::Index m = 0; m < nk; ++m) {
    std::complex<double> s_sum{0.0, 0.0};
    double p_sum = 0.0;
    for (std::size_t i = 0; i < nw; ++i) {
      s_sum += sums[i][m];
      p_sum += std::norm(sums[i][m]);
    }
    const double dn = static_cast<double>(nw);
    const double var =
        (p_sum - std::norm(s_sum) / dn) / (dn - 1.0);  // Bessel-corrected
    out.curve.values[m] = var / nbar;

    if (nw >= 3) {
      const double total_count = nbar * dn;
      for (std::size_t i = 0; i < nw; ++i) {
        const std::complex<double> s_i = s_sum - sums[i][m];
        const double p_i = p_sum - std::norm(sums[i][m]);
        const double var_i = (p_i - std::norm(s_i) / (dn - 1.0)) / (dn - 2.0);
        const double nbar_i =
            (total_count - static_cast<double>(windows[i].levels.size())) /
            (dn - 1.0);
        loo[i] = var_i / nbar_i;
      }
      out.curve.stderrs[m] = jackknife_stderr(loo);
    }
  }
  return out;
}

NumberVarianceEstimate number_variance_estimate(
    std::span<const LevelWindow> windows, const Eigen::ArrayXd& r_grid,
    const NumberVarianceOptions& options) {
  if (windows.empty())
    throw std::invalid_argument("number_variance_estimate: no windows");
  const std::size_t nw = windows.size();
  const Eigen::Index nr = r_grid.size();
  for (Eigen::Index i = 0; i < nr; ++i)
    if (!(r_grid[i] >= 0.0))
      throw std::invalid_argument("number_variance_estimate: r must be >= 0");

  double min_half_width = 1e300;
  for (const auto& w : windows)
    min_half_width = std::min(min_half_width, w.half_width);

  std::vector<double> offsets{0.0};
  if (options.offset_averaging) {
    const double span =
        options.offset_span > 0.0 ? options.offset_span : 0.5 * min_half_width;
    const int n_off = std::max(options.n_offsets, 1);
    offsets.resize(n_off);
    for (int o = 0; o < n_off; ++o)
      offsets[o] = n_off == 1
                       ? 0.0
                       : -span + 2.0 * span * o / static_cast<double>(n_off - 1);
  }

  const double max_r = nr ? r_grid[nr - 1] : 0.0;
  const double max_off =
      std::max(std::abs(offsets.front()), std::abs(offsets.back()));
  if (max_r > 1.6 * min_half_width || 0.5 * max_r + max_off > min_half_width)
    throw std::invalid_argument(
        "number_variance_estimate: r grid exceeds the window "
        "(max r = " + std::to_string(max_r) +
        ", window half-width = " + std::to_string(min_half_width) + ")");

  const std::size_t n_off = offsets.size();
  const std::size_t cells = static_cast<std::size_t>(nr) * n_off;

  // counts[i * cells + (m * n_off + o)]
  std::vector<std::uint32_t> counts(nw * cells);
  for (std::size_t i = 0; i < nw; ++i) {
    const auto& lv = windows[i].levels;
    const double* begin = lv.data();
    const double* end = begin + lv.size();
    for (Eigen::Index m = 0; m < nr; ++m) {
      const double half_r = 0.5 * r_grid[m];
      for (std::size_t o = 0; o < n_off; ++o) {
        const double* lo = std::lower_bound(begin, end, offsets[o] - half_r);
        const double* hi = std::lower_bound(lo, end, offsets[o] + half_r);
        counts[i * cells + m * n_off + o] =
            static_cast<std::uint32_t>(hi - lo);
      }
    }
  }

  NumberVarianceEstimate out;
  out.zeta_center = windows[0].zeta_center;
  out.local_density = windows[0].local_density;
  out.curve.kind = CurveKind::number_variance;
  out.curve.abscissa = r_grid;
  out.curve.values.resize(nr);
  out.curve.stderrs = Eigen::ArrayXd::Zero(nr);

  const double dn = static_cast<double>(nw);
  std::vector<double> loo(nw);
  std::vector<double> s1(n_off), s2(n_off);
  for (Eigen::Index m = 0; m < nr; ++m) {
    std::fill(s1.begin(), s1.end(), 0.0);
    std::fill(s2.begin(), s2.end(), 0.0);
    for (std::size_t i = 0; i < nw; ++i)
      for (std::size_t o = 0; o < n_off; ++o) {
        const double c = counts[i * cells + m * n_off + o];
        s1[o] += c;
        s2[o] += c * c;
      }

    double v = 0.0;
    for (std::size_t o = 0; o < n_off; ++o)
      v += nw >= 2 ? (s2[o] - s1[o] * s1[o] / dn) / (dn - 1.0) : 0.0;
    out.curve.values[m] = v / static_cast<double>(n_off);

    if (nw >= 3) {
      for (std::size_t i = 0; i < nw; ++i) {
        double vi = 0.0;
        for (std::size_t o = 0; o < n_off; ++o) {
          const double c = counts[i * cells + m * n_off + o];
          const double s1i = s1[o] - c;
          const double s2i = s2[o] - c * c;
          vi += (s2i - s1i * s1i / (dn - 1.0)) / (dn - 2.0);
        }
        loo[i] = vi / static_cast<double>(n_off);
      }
      out.curve.stderrs[m] = jackknife_stderr(loo);
    }
  }
  return out;
}

Curve SpacingHistogram::as_curve() const {
  Curve c;
  c.kind = CurveKind::spacing_pdf;
  const Eigen::Index nb = density.size();
  c.abscissa.resize(nb);
  for (Eigen::Index b = 0; b < nb; ++b)
    c.abscissa[b] = 0.5 * (bin_edges[b] + bin_edges[b + 1]);
  c.values = density;
  c.stderrs = Eigen::ArrayXd::Zero(nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const double w = bin_edges[b + 1] - bin_edges[b];
    if (total_in_range > 0 && counts[b] > 0)
      c.stderrs[b] = std::sqrt(static_cast<double>(counts[b])) /
                     (static_cast<double>(total_in_range) * w);
  }
  return c;
}

SpacingHistogram spacing_histogram(std::span<const LevelWindow> windows,
                                   int order, int bins, double s_max) {
  if (order < 0)
    throw std::invalid_argument("spacing_histogram: order must be >= 0");
  if (bins < 1 || !(s_max > 0.0))
    throw std::invalid_argument("spacing_histogram: bad binning");
  for (const auto& w : windows)
    if (w.levels.size() < order + 2)
      throw std::invalid_argument(
          "spacing_histogram: window with fewer than order+2 levels");

  SpacingHistogram h;
  h.order = order;
  h.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b)
    h.bin_edges[b] = s_max * b / static_cast<double>(bins);
  h.counts.assign(bins, 0);

  double sum_s = 0.0;
  long pooled = 0;
  const double inv_width = bins / s_max;
  for (const auto& w : windows) {
    const auto& lv = w.levels;
    const Eigen::Index n = lv.size();
    for (Eigen::Index j = 0; j + order + 1 < n; ++j) {
      const double s = lv[j + order + 1] - lv[j];
      sum_s += s;
      ++pooled;
      if (s < s_max) {
        const int b = std::min(static_cast<int>(s * inv_width), bins - 1);
        ++h.counts[b];
      }
    }
  }

  h.total_pooled = pooled;
  h.mean_spacing = pooled ? sum_s / static_cast<double>(pooled) : 0.0;
  h.total_in_range = 0;
  for (long c : h.counts) h.total_in_range += c;

  h.density.resize(bins);
  const double width = s_max / bins;
  for (int b = 0; b < bins; ++b)
    h.density[b] = h.total_in_range
                       ? h.counts[b] / (static_cast<double>(h.total_in_range) * width)
                       : 0.0;
  return h;
}

double poisson_pk(double s, int k) {
  if (s < 0.0) throw std::invalid_argument("poisson_pk: s must be >= 0");
  if (k < 0) throw std::invalid_argument("poisson_pk: k must be >= 0");
  if (s == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(s) - std::lgamma(k + 1.0) - s);
}

}  // namespace ege
