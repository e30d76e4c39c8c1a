#include "ege/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ege {

TwoParticleSpectrum two_particle_levels(const OneParticleSpectrum& sp) {
  const Eigen::Index n = sp.levels.size();
  if (n < 2)
    throw std::invalid_argument("two_particle_levels: need at least 2 levels");
  TwoParticleSpectrum out;
  out.realization_index = sp.realization_index;
  out.levels.resize(n * (n - 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      out.levels[idx++] = sp.levels[i] + sp.levels[j];
  std::sort(out.levels.begin(), out.levels.end());
  return out;
}

double tent_density(double xi, int n) {
  const double half_n = 0.5 * n;
  if (std::abs(xi) > static_cast<double>(n)) return 0.0;
  return std::max(half_n - 0.5 * std::abs(xi) - 0.25, 0.0);
}

double unfold_tent(double xi, int n) {
  if (std::abs(xi) > static_cast<double>(n))
    throw std::domain_error("unfold_tent: |xi| exceeds two-particle support");
  const double half_n = 0.5 * n;
  return half_n * xi - std::copysign(0.25 * xi * xi, xi);
}

double invert_unfold_tent(double zeta, int n) {
  const double nd = static_cast<double>(n);
  const double zmax = 0.25 * nd * nd;
  if (std::abs(zeta) > zmax)
    throw std::domain_error("invert_unfold_tent: |zeta| exceeds N^2/4");
  const double az = std::abs(zeta);
  const double xi = nd - std::sqrt(nd * nd - 4.0 * az);
  return std::copysign(xi, zeta);
}

namespace {

// shared cut-and-recentre step; unfold(xi) must be strictly increasing
template <typename Unfold>
LevelWindow cut_window(const TwoParticleSpectrum& tp, double zeta_center,
                       double half_width, Unfold&& unfold, double xi_lo,
                       double xi_hi) {
  LevelWindow w;
  w.zeta_center = zeta_center;
  w.half_width = half_width;
  w.realization_index = tp.realization_index;

  const double* begin = tp.levels.data();
  const double* end = begin + tp.levels.size();
  const double* lo = std::lower_bound(begin, end, xi_lo);
  const double* hi = std::upper_bound(lo, end, xi_hi);

  std::vector<double> selected;
  selected.reserve(static_cast<std::size_t>(hi - lo));
  const double z_lo = zeta_center - half_width;
  const double z_hi = zeta_center + half_width;
  for (const double* p = lo; p != hi; ++p) {
    const double z = unfold(*p);
    if (z >= z_lo && z <= z_hi) selected.push_back(z - zeta_center);
  }
  if (selected.empty())
    throw WindowError("extract_window: no levels fall inside the window");
  w.levels = Eigen::Map<Eigen::ArrayXd>(selected.data(), selected.size());
  return w;
}

void check_density_variation(double rho_lo, double rho_c, double rho_hi) {
  if (!(rho_c > 0.0))
    throw WindowError("extract_window: nonpositive density at window center");
  const double var =
      std::max(std::abs(rho_lo - rho_c), std::abs(rho_hi - rho_c)) / rho_c;
  if (var > 0.02)
    throw WindowError(
        "extract_window: density varies by " + std::to_string(100.0 * var) +
        "% across the window (limit 2%); shrink the window or move it");
}

}  // namespace

LevelWindow extract_window(const TwoParticleSpectrum& tp, double zeta_center,
                           double half_width, int n) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("extract_window: half_width must be > 0");
  const double nd = static_cast<double>(n);
  const double zmax = 0.25 * nd * nd;
  if (std::abs(zeta_center) + half_width >= zmax)
    throw WindowError("extract_window: window reaches the support edge");

  const double xi_lo = invert_unfold_tent(zeta_center - half_width, n);
  const double xi_hi = invert_unfold_tent(zeta_center + half_width, n);
  const double xi_c = invert_unfold_tent(zeta_center, n);
  check_density_variation(tent_density(xi_lo, n), tent_density(xi_c, n),
                          tent_density(xi_hi, n));

  LevelWindow w =
      cut_window(tp, zeta_center, half_width,
                 [n](double xi) { return unfold_tent(xi, n); }, xi_lo, xi_hi);
  w.xi_center = xi_c;
  w.local_density = tent_density(xi_c, n);
  return w;
}

UnfoldingMap::UnfoldingMap(Eigen::ArrayXd xi_knots, Eigen::ArrayXd zeta_knots)
    : x_(std::move(xi_knots)), y_(std::move(zeta_knots)) {
  const Eigen::Index n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("UnfoldingMap: need >= 3 matching knots");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]) || !(y_[i] > y_[i - 1]))
      throw std::runtime_error("UnfoldingMap: knots not strictly increasing");

  // Fritsch-Carlson monotone slopes
  m_.resize(n);
  Eigen::ArrayXd d(n - 1);
  for (Eigen::Index i = 0; i < n - 1; ++i)
    d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (Eigen::Index i = 1; i < n - 1; ++i)
    m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / d[i];
    const double b = m_[i + 1] / d[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m_[i] = t * a * d[i];
      m_[i + 1] = t * b * d[i];
    }
  }
}

namespace {

Eigen::Index locate(const Eigen::ArrayXd& x, double v) {
  const double* begin = x.data();
  const double* end = begin + x.size();
  const double* it = std::upper_bound(begin, end, v);
  Eigen::Index i = it - begin;
  if (i <= 0) i = 1;
  if (i >= x.size()) i = x.size() - 1;
  return i - 1;
}

}  // namespace

double UnfoldingMap::operator()(double xi) const {
  if (xi < x_[0] || xi > x_[x_.size() - 1])
    throw std::domain_error("UnfoldingMap: xi outside the fitted range");
  const Eigen::Index i = locate(x_, xi);
  const double h = x_[i + 1] - x_[i];
  const double t = (xi - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double UnfoldingMap::derivative(double xi) const {
  if (xi < x_[0] || xi > x_[x_.size() - 1])
    throw std::domain_error("UnfoldingMap: xi outside the fitted range");
  const Eigen::Index i = locate(x_, xi);
  const double h = x_[i + 1] - x_[i];
  const double t = (xi - x_[i]) / h;
  const double t2 = t * t;
  const double dh00 = (6 * t2 - 6 * t) / h;
  const double dh10 = 3 * t2 - 4 * t + 1;
  const double dh01 = (-6 * t2 + 6 * t) / h;
  const double dh11 = 3 * t2 - 2 * t;
  return dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
}

double UnfoldingMap::inverse(double zeta) const {
  if (zeta < y_[0] || zeta > y_[y_.size() - 1])
    throw std::domain_error("UnfoldingMap: zeta outside the fitted range");
  Eigen::Index i = locate(y_, zeta);
  double lo = x_[i], hi = x_[i + 1];
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < zeta)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EmpiricalUnfoldingBuilder::EmpiricalUnfoldingBuilder(double xi_min,
                                                     double xi_max,
                                                     int grid_size) {
  if (!(xi_max > xi_min) || grid_size < 8)
    throw std::invalid_argument("EmpiricalUnfoldingBuilder: bad grid");
  knots_.resize(grid_size);
  for (int i = 0; i < grid_size; ++i)
    knots_[i] = xi_min + (xi_max - xi_min) * i / static_cast<double>(grid_size - 1);
  cumulative_ = Eigen::ArrayXd::Zero(grid_size);
}

void EmpiricalUnfoldingBuilder::add(const TwoParticleSpectrum& tp) {
  // single sweep: cumulative count of levels <= knot
  const Eigen::Index g = knots_.size();
  const double* level = tp.levels.data();
  const double* end = level + tp.levels.size();
  long count = 0;
  for (Eigen::Index j = 0; j < g; ++j) {
    while (level != end && *level <= knots_[j]) {
      ++level;
      ++count;
    }
    cumulative_[j] += static_cast<double>(count);
  }
  ++count_;
}

void EmpiricalUnfoldingBuilder::merge(const EmpiricalUnfoldingBuilder& other) {
  if (other.knots_.size() != knots_.size())
    throw std::invalid_argument("EmpiricalUnfoldingBuilder: grid mismatch");
  cumulative_ += other.cumulative_;
  count_ += other.count_;
}

UnfoldingMap EmpiricalUnfoldingBuilder::build() const {
  if (count_ < 50)
    throw std::runtime_error(
        "unfold_empirical: need >= 50 realizations for a stable map, got " +
        std::to_string(count_));
  Eigen::ArrayXd mean = cumulative_ / static_cast<double>(count_);
  const double total = mean[mean.size() - 1];

  // trim flat tails so the knots are strictly increasing in zeta
  const double tiny = std::max(total * 1e-9, 1e-12);
  Eigen::Index lo = 0, hi = mean.size() - 1;
  while (lo + 2 < hi && mean[lo + 1] - mean[lo] < tiny) ++lo;
  while (hi - 2 > lo && mean[hi] - mean[hi - 1] < tiny) --hi;

  std::vector<double> xs, ys;
  xs.reserve(hi - lo + 1);
  double prev = -1e300;
  for (Eigen::Index i = lo; i <= hi; ++i) {
    if (mean[i] - prev < tiny) continue;
    xs.push_back(knots_[i]);
    ys.push_back(mean[i] - 0.5 * total);
    prev = mean[i];
  }
  if (xs.size() < 3)
    throw std::runtime_error("unfold_empirical: degenerate staircase");
  return UnfoldingMap(
      Eigen::Map<Eigen::ArrayXd>(xs.data(), xs.size()),
      Eigen::Map<Eigen::ArrayXd>(ys.data(), ys.size()));
}

UnfoldingMap unfold_empirical(std::span<const TwoParticleSpectrum> spectra,
                              int grid_size) {
  if (spectra.empty())
    throw std::invalid_argument("unfold_empirical: empty ensemble");
  double lo = 1e300, hi = -1e300;
  for (const auto& tp : spectra) {
    lo = std::min(lo, tp.levels[0]);
    hi = std::max(hi, tp.levels[tp.levels.size() - 1]);
  }
  const double pad = 1e-9 * (hi - lo);
  EmpiricalUnfoldingBuilder builder(lo - pad, hi + pad, grid_size);
  for (const auto& tp : spectra) builder.add(tp);
  return builder.build();
}

LevelWindow extract_window_mapped(const TwoParticleSpectrum& tp,
                                  const UnfoldingMap& map, double zeta_center,
                                  double half_width) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("extract_window: half_width must be > 0");
  if (zeta_center - half_width <= map.zeta_min() ||
      zeta_center + half_width >= map.zeta_max())
    throw WindowError("extract_window: window reaches the support edge");

  const double xi_lo = map.inverse(zeta_center - half_width);
  const double xi_hi = map.inverse(zeta_center + half_width);
  const double xi_c = map.inverse(zeta_center);
  // density from map secants over the window halves: the knot-scale jitter
  // of the interpolant derivative averages out over these spans
  const double rho_lo = half_width / (xi_c - xi_lo);
  const double rho_hi = half_width / (xi_hi - xi_c);
  const double rho_c = 2.0 * half_width / (xi_hi - xi_lo);
  check_density_variation(rho_lo, rho_c, rho_hi);

  LevelWindow w = cut_window(tp, zeta_center, half_width,
                             [&map](double xi) { return map(xi); }, xi_lo,
                             xi_hi);
  w.xi_center = xi_c;
  w.local_density = rho_c;
  return w;
}

}  // namespace ege
