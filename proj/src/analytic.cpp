#include "ege/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ege/quadrature.hpp"
#include "ege/specfun.hpp"

namespace ege::analytic {

namespace quad = ege::quadrature;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kPi2 = kPi * kPi;
constexpr double kLog3 = 1.09861228866810969139524523692;

// (sin(pi k r) / (pi k))^2, stable at k -> 0
double count_kernel(double k, double r) {
  if (k == 0.0) return r * r;
  const double s = std::sin(kPi * k * r) / (kPi * k);
  return s * s;
}

// 2 int_a^inf (sin(pi k r)/(pi k))^2 dk  (Poisson tail, closed form)
double poisson_tail(double a, double r) {
  const double x = kPi * a * r;
  return 2.0 * r / kPi *
         (std::sin(x) * std::sin(x) / x + kPi / 2.0 -
          ege::specfun::sine_integral(2.0 * x));
}

}  // namespace

AnalyticModel AnalyticModel::egue(double local_density) {
  AnalyticModel m;
  m.kind = Kind::egue;
  m.local_density = local_density;
  m.validate();
  return m;
}

AnalyticModel AnalyticModel::egse(double local_density) {
  AnalyticModel m;
  m.kind = Kind::egse;
  m.local_density = local_density;
  m.validate();
  return m;
}

AnalyticModel AnalyticModel::egoe(double local_density) {
  AnalyticModel m;
  m.kind = Kind::egoe;
  m.local_density = local_density;
  m.validate();
  return m;
}

AnalyticModel AnalyticModel::for_beta(BetaKind beta, double local_density) {
  switch (beta) {
    case BetaKind::orthogonal: return egoe(local_density);
    case BetaKind::unitary: return egue(local_density);
    case BetaKind::symplectic: return egse(local_density);
    case BetaKind::poisson: break;
  }
  throw std::invalid_argument("AnalyticModel: no embedded model for poisson");
}

AnalyticModel AnalyticModel::poisson_cutoff(double delta) {
  AnalyticModel m;
  m.kind = Kind::poisson_cutoff;
  m.delta = delta;
  m.validate();
  return m;
}

AnalyticModel AnalyticModel::gxe_cutoff(double delta, BetaKind beta) {
  AnalyticModel m;
  m.kind = Kind::gxe_cutoff;
  m.delta = delta;
  m.beta = beta;
  m.validate();
  return m;
}

void AnalyticModel::validate() const {
  if (is_embedded()) {
    if (!(local_density > 0.0))
      throw std::invalid_argument("AnalyticModel: local_density must be > 0");
  } else {
    if (!(delta > 0.0))
      throw std::invalid_argument("AnalyticModel: cutoff delta must be > 0");
    if (kind == Kind::gxe_cutoff && beta == BetaKind::poisson)
      throw std::invalid_argument("AnalyticModel: gxe_cutoff needs beta 1/2/4");
  }
}

std::string to_string(AnalyticModel::Kind kind) {
  switch (kind) {
    case AnalyticModel::Kind::egue: return "egue";
    case AnalyticModel::Kind::egse: return "egse";
    case AnalyticModel::Kind::egoe: return "egoe";
    case AnalyticModel::Kind::poisson_cutoff: return "poisson_cutoff";
    case AnalyticModel::Kind::gxe_cutoff: return "gxe_cutoff";
  }
  return "?";
}

double b2_one_particle(double k, BetaKind beta) {
  const double a = std::abs(k);
  switch (beta) {
    case BetaKind::unitary:
      return a >= 1.0 ? 0.0 : 1.0 - a;
    case BetaKind::symplectic:
      if (a >= 2.0) return 0.0;
      return 1.0 - 0.5 * a + 0.25 * a * std::log(std::abs(1.0 - a));
    case BetaKind::orthogonal:
      if (a <= 1.0) return 1.0 - 2.0 * a + a * std::log1p(2.0 * a);
      return -1.0 + a * std::log1p(2.0 / (2.0 * a - 1.0));
    case BetaKind::poisson:
      return 0.0;
  }
  return 0.0;
}

namespace {

// support edge of b2 in chi units; beyond it F2 is 1 exactly (unitary,
// symplectic) or 1 - O(chi^-2) (orthogonal)
double b2_support_edge(BetaKind beta) {
  switch (beta) {
    case BetaKind::unitary: return 1.0;
    case BetaKind::symplectic: return 2.0;
    default: return 0.0;  // no sharp edge
  }
}

}  // namespace

double f2_two_particle(double k, const AnalyticModel& model) {
  model.validate();
  const double a = std::abs(k);
  switch (model.kind) {
    case AnalyticModel::Kind::poisson_cutoff:
      return a <= model.delta ? 0.0 : 1.0;
    case AnalyticModel::Kind::gxe_cutoff:
      return a <= model.delta ? 0.0 : 1.0 - b2_one_particle(a, model.beta);
    default: {
      const double chi = a * model.local_density;
      const BetaKind beta = model.kind == AnalyticModel::Kind::egue
                                ? BetaKind::unitary
                                : model.kind == AnalyticModel::Kind::egse
                                      ? BetaKind::symplectic
                                      : BetaKind::orthogonal;
      const double f = 1.0 - b2_one_particle(chi, beta);
      return f * f;
    }
  }
}

double f2_two_particle_windowed(double k, const AnalyticModel& model,
                                double window_width) {
  model.validate();
  if (!(window_width > 0.0))
    throw std::invalid_argument("f2_two_particle_windowed: width must be > 0");
  const double w = window_width;

  // support of 1 - F2 in k units, plus kinks of F2
  double k_support;
  std::vector<double> kinks;
  switch (model.kind) {
    case AnalyticModel::Kind::egue:
      k_support = 1.0 / model.local_density;
      kinks = {k_support};
      break;
    case AnalyticModel::Kind::egse:
      k_support = 2.0 / model.local_density;
      kinks = {1.0 / model.local_density, k_support};
      break;
    case AnalyticModel::Kind::egoe:
      k_support = 80.0 / model.local_density;  // |1-F| < 3e-5 beyond
      kinks = {1.0 / model.local_density};
      break;
    default:
      k_support = std::max(model.delta, 4.0);
      kinks = {model.delta, 1.0, 2.0};
      break;
  }

  auto integrand = [&](double q) {
    const double b = 1.0 - f2_two_particle(q, model);
    const double d = q - k;
    double kern;
    if (d == 0.0) {
      kern = w;
    } else {
      const double s = std::sin(kPi * w * d);
      kern = s * s / (kPi2 * w * d * d);
    }
    return b * kern;
  };

  // pre-split at the Fejer kernel oscillation scale so adaptive refinement
  // cannot step over whole lobes
  std::vector<double> cuts = kinks;
  for (double s : kinks) cuts.push_back(-s);
  const double lo = -k_support, hi = k_support;
  const int max_cells = 4000;
  double step = 1.0 / w;
  if ((hi - lo) / step > max_cells) step = (hi - lo) / max_cells;
  for (double q = std::floor((lo - k) / step) * step + k; q < hi; q += step)
    if (q > lo) cuts.push_back(q);

  auto r = quad::integrate_finite(integrand, lo, hi, 1e-9, cuts);
  return 1.0 - r.value;
}

namespace {

double sigma2_egue_closed(double delta, double density) {
  if (delta < 1e-4) {
    return density * (delta - 4.0 / 3.0 * delta * delta +
                      4.0 * kPi2 / 45.0 * std::pow(delta, 4));
  }
  const double td = 2.0 * kPi * delta;
  const double bracket = 2.0 + kPi2 * delta - std::cos(td) -
                         std::sin(td) / td -
                         td * ege::specfun::sine_integral(td);
  return density / kPi2 * bracket;
}

double sigma2_egse_closed(double delta, double density) {
  if (delta < 1e-4) {
    return density * (delta - 28.0 / 27.0 * delta * delta);
  }
  const double td = 2.0 * kPi * delta;
  const double qd = 4.0 * kPi * delta;
  const double bracket =
      14.0 + 8.0 * kPi2 * delta -
      2.0 * std::cos(td) * ege::specfun::sine_integral(td) / (kPi * delta) -
      16.0 * kPi * delta * ege::specfun::sine_integral(qd) -
      4.0 * std::cos(qd) - std::sin(qd) / (kPi * delta) -
      2.0 * std::cos(td) *
          ege::specfun::hyp2f3_half(-kPi2 * delta * delta);
  return density / (8.0 * kPi2) * bracket;
}

// residual double integral of the orthogonal-ensemble closed form:
// 2 int_1^3 int_Delta^inf sin(pi(kt - Delta))/(k t) dk dt, with the inner
// integral reduced to Si/Ci
double egoe_double_integral(double delta) {
  auto inner = [delta](double t) {
    const double x = kPi * delta * t;
    return (std::cos(kPi * delta) *
                (kPi / 2.0 - ege::specfun::sine_integral(x)) +
            std::sin(kPi * delta) * ege::specfun::cosine_integral(x)) /
           t;
  };
  return 2.0 * quad::integrate_finite(inner, 1.0, 3.0, 1e-11).value;
}

// slowly-decaying tail correction (the sigma term)
double egoe_sigma_term(double delta, double density) {
  auto envelope = [density](double k) {
    const double kl = k * std::log1p(2.0 / (2.0 * k - 1.0));
    return 2.0 * density * (3.0 + kl * kl - 4.0 * kl) / (kPi2 * k * k);
  };
  return quad::integrate_oscillatory_tail(envelope, delta, 1.0, 1e-10).value;
}

double sigma2_egoe_closed(double delta, double density, bool with_sigma) {
  if (delta < 1e-4) {
    const double c2 = small_r_coefficient(BetaKind::orthogonal);
    return density * delta * (1.0 - c2 * delta);
  }
  const double pd = kPi * delta;
  const double log9 = 2.0 * kLog3;
  const double si_pd = ege::specfun::sine_integral(pd);
  const double si_3pd = ege::specfun::sine_integral(3.0 * pd);
  const double si_2pd = ege::specfun::sine_integral(2.0 * pd);
  const double ci_pd = ege::specfun::cosine_integral(pd);
  const double ci_3pd = ege::specfun::cosine_integral(3.0 * pd);

  const double bracket =
      std::cos(pd) * (4.0 * si_pd + (log9 - 4.0) * si_3pd) -
      std::sin(pd) * (4.0 * ci_pd + (log9 - 4.0) * ci_3pd) -
      2.0 * pd * std::cos(2.0 * pd) -
      (kLog3 - 2.0) * (kLog3 - 2.0) * std::sin(2.0 * pd) +
      pd * (22.0 + 3.0 * kLog3 * (kLog3 - 6.0) - 4.0 * pd * si_2pd) -
      kPi * kLog3 * std::cos(pd) + 2.0 * kPi * kPi2 * delta * delta +
      egoe_double_integral(delta);

  double value = density / (2.0 * kPi * kPi2 * delta) * bracket;
  if (with_sigma) value += egoe_sigma_term(delta, density);
  return value;
}

}  // namespace

double sigma2_closed(double r, const AnalyticModel& model) {
  model.validate();
  if (!model.is_embedded())
    throw std::invalid_argument(
        "sigma2_closed: closed forms exist for the embedded ensembles only");
  if (!(r > 0.0)) {
    if (r == 0.0) return 0.0;
    throw std::invalid_argument("sigma2_closed: r must be >= 0");
  }
  const double delta = r / model.local_density;
  switch (model.kind) {
    case AnalyticModel::Kind::egue:
      return sigma2_egue_closed(delta, model.local_density);
    case AnalyticModel::Kind::egse:
      return sigma2_egse_closed(delta, model.local_density);
    default:
      return sigma2_egoe_closed(delta, model.local_density, true);
  }
}

double sigma2_closed_egoe_without_sigma(double r, const AnalyticModel& model) {
  model.validate();
  if (model.kind != AnalyticModel::Kind::egoe)
    throw std::invalid_argument("expected the orthogonal embedded model");
  if (r == 0.0) return 0.0;
  return sigma2_egoe_closed(r / model.local_density, model.local_density,
                            false);
}

double sigma2_quadrature(double r,
                         const std::function<double(double)>& form_factor,
                         const std::vector<double>& kinks, double tail_start,
                         double tol) {
  if (!(r > 0.0))
    throw std::invalid_argument("sigma2_quadrature: r must be > 0");

  double k0 = tail_start;
  if (k0 <= 0.0) {
    // probe for the point beyond which F == 1 (support edge)
    for (double k = 1.0; k <= 1.1e9; k *= 2.0) {
      if (std::abs(form_factor(k) - 1.0) < 1e-10 &&
          std::abs(form_factor(2.7 * k) - 1.0) < 1e-10) {
        k0 = k;
        break;
      }
    }
    if (k0 <= 0.0)
      throw std::invalid_argument(
          "sigma2_quadrature: form factor does not reach 1; pass tail_start");
  }

  auto integrand = [&](double k) { return form_factor(k) * count_kernel(k, r); };

  // pre-split at the sin^2 oscillation scale
  std::vector<double> cuts = kinks;
  double step = 0.5 / r;
  const int max_cells = 60000;
  if (k0 / step > max_cells) step = k0 / max_cells;
  for (double q = step; q < k0; q += step) cuts.push_back(q);

  double value = 2.0 * quad::integrate_finite(integrand, 0.0, k0, tol * 0.5,
                                              cuts, 8'000'000)
                           .value;
  value += poisson_tail(k0, r);

  // residual where F differs from 1 beyond the tail start
  const bool exact_one = form_factor(k0 * 1.3) == 1.0 &&
                         form_factor(k0 * 2.1) == 1.0 &&
                         form_factor(k0 * 5.7) == 1.0;
  if (!exact_one) {
    auto envelope = [&](double k) {
      return 2.0 * (form_factor(k) - 1.0) / (kPi2 * k * k);
    };
    value += quad::integrate_oscillatory_tail(envelope, r, k0, tol * 0.5).value;
  }
  return value;
}

double sigma2_quadrature(double r, const AnalyticModel& model, double tol) {
  model.validate();
  auto f = [&model](double k) { return f2_two_particle(k, model); };
  const double rho = model.local_density;
  switch (model.kind) {
    case AnalyticModel::Kind::egue:
      return sigma2_quadrature(r, f, {1.0 / rho}, 1.0 / rho, tol);
    case AnalyticModel::Kind::egse:
      return sigma2_quadrature(r, f, {1.0 / rho, 2.0 / rho}, 2.0 / rho, tol);
    case AnalyticModel::Kind::egoe:
      // F = 1 - O(chi^-2); the residual integral handles the tail
      return sigma2_quadrature(r, f, {1.0 / rho}, 40.0 / rho, tol);
    case AnalyticModel::Kind::poisson_cutoff:
      return sigma2_quadrature(r, f, {model.delta}, model.delta, tol);
    case AnalyticModel::Kind::gxe_cutoff: {
      const double edge = b2_support_edge(model.beta);
      if (edge > 0.0)
        return sigma2_quadrature(r, f, {model.delta, edge},
                                 std::max(model.delta, edge), tol);
      // orthogonal: no sharp edge; |F - 1| <= ~1/(200 k^2) beyond k = 4
      return sigma2_quadrature(r, f, {model.delta, 1.0},
                               std::max(model.delta, 4.0), tol);
    }
  }
  throw std::logic_error("sigma2_quadrature: unreachable");
}

double sigma2_saturation(const AnalyticModel& model) {
  model.validate();
  switch (model.kind) {
    case AnalyticModel::Kind::egue:
      return 2.0 / kPi2 * model.local_density;
    case AnalyticModel::Kind::egse:
      return 7.0 / (4.0 * kPi2) * model.local_density;
    case AnalyticModel::Kind::egoe:
      return 0.5 / kPi2 *
             (28.0 - 18.0 * kLog3 - 12.0 * ege::specfun::dilog(-2.0) -
              2.0 * kPi2) *
             model.local_density;
    case AnalyticModel::Kind::poisson_cutoff:
      return 1.0 / (kPi2 * model.delta);
    case AnalyticModel::Kind::gxe_cutoff:
      return sigma2_saturation_quadrature(model);
  }
  throw std::logic_error("sigma2_saturation: unreachable");
}

double sigma2_saturation_quadrature(const AnalyticModel& model, double tol) {
  model.validate();
  // int F(k)/(2 pi^2 k^2) dk over the real line = (1/pi^2) int_0^inf F/k^2.
  // Convergence needs F = O(k^(1+eps)) at 0: true for the embedded models
  // (F ~ k^2) and the cutoff models (F = 0 below delta), not for the plain
  // Gaussian or Poisson ensembles.
  auto f = [&model](double k) { return f2_two_particle(k, model); };

  double lo = 0.0, edge = 0.0;
  std::vector<double> kinks;
  bool tail_exact_one = true;
  switch (model.kind) {
    case AnalyticModel::Kind::egue:
      edge = 1.0 / model.local_density;
      kinks = {edge};
      break;
    case AnalyticModel::Kind::egse:
      edge = 2.0 / model.local_density;
      kinks = {1.0 / model.local_density, edge};
      break;
    case AnalyticModel::Kind::egoe:
      edge = 40.0 / model.local_density;
      kinks = {1.0 / model.local_density};
      tail_exact_one = false;
      break;
    case AnalyticModel::Kind::poisson_cutoff:
      lo = model.delta;
      edge = std::max(4.0, 2.0 * model.delta);
      break;
    case AnalyticModel::Kind::gxe_cutoff: {
      lo = model.delta;
      const double supp = b2_support_edge(model.beta);
      edge = std::max({4.0, 2.0 * model.delta, supp});
      if (supp > 0.0 && supp > lo)
        kinks = {supp};
      else if (supp == 0.0) {
        kinks = {1.0};
        tail_exact_one = false;
      }
      break;
    }
  }

  auto integrand = [&](double k) { return f(k) / (k * k); };
  double value =
      quad::integrate_finite(integrand, lo, edge, tol * kPi2, kinks).value;
  value += 1.0 / edge;  // exact F == 1 tail
  if (!tail_exact_one) {
    auto envelope = [&](double k) { return (f(k) - 1.0) / (k * k); };
    value += quad::integrate_oscillatory_tail(envelope, 0.0, edge, tol).value;
  }
  return value / kPi2;
}

double small_r_coefficient(BetaKind beta) {
  switch (beta) {
    case BetaKind::unitary:
      return 4.0 / 3.0;
    case BetaKind::symplectic:
      return 28.0 / 27.0;
    case BetaKind::orthogonal: {
      // c2 = 2 - 2 int_0^inf b2(k)^2 dk, evaluated once
      static const double c2 = [] {
        auto b2sq = [](double k) {
          const double b = b2_one_particle(k, BetaKind::orthogonal);
          return b * b;
        };
        const double head =
            quad::integrate_finite(b2sq, 0.0, 1.0, 1e-12).value;
        const double tail =
            quad::integrate_oscillatory_tail(b2sq, 0.0, 1.0, 1e-12).value;
        return 2.0 - 2.0 * (head + tail);
      }();
      return c2;
    }
    case BetaKind::poisson:
      break;
  }
  throw std::invalid_argument("small_r_coefficient: needs beta 1/2/4");
}

double sigma2_small_r(double r, const AnalyticModel& model) {
  model.validate();
  if (!model.is_embedded())
    throw std::invalid_argument("sigma2_small_r: embedded ensembles only");
  const BetaKind beta = model.kind == AnalyticModel::Kind::egue
                            ? BetaKind::unitary
                            : model.kind == AnalyticModel::Kind::egse
                                  ? BetaKind::symplectic
                                  : BetaKind::orthogonal;
  return r - small_r_coefficient(beta) * r * r / model.local_density;
}

double y2_two_particle(double r, const AnalyticModel& model) {
  model.validate();
  if (!model.is_embedded())
    throw std::invalid_argument("y2_two_particle: embedded ensembles only");
  const double rho = model.local_density;
  const double delta = std::abs(r) / rho;

  const BetaKind beta = model.kind == AnalyticModel::Kind::egue
                            ? BetaKind::unitary
                            : model.kind == AnalyticModel::Kind::egse
                                  ? BetaKind::symplectic
                                  : BetaKind::orthogonal;
  auto cluster_ft = [beta](double chi) {
    const double b = b2_one_particle(chi, beta);
    return 2.0 * b - b * b;  // 1 - F2^(2) in chi units
  };
  auto integrand = [&](double chi) {
    return cluster_ft(chi) * std::cos(2.0 * kPi * chi * delta);
  };

  double value = 0.0;
  switch (model.kind) {
    case AnalyticModel::Kind::egue:
      value = quad::integrate_finite(integrand, 0.0, 1.0, 1e-10).value;
      break;
    case AnalyticModel::Kind::egse:
      value = quad::integrate_finite(integrand, 0.0, 2.0, 1e-10, {1.0}).value;
      break;
    default: {
      value = quad::integrate_finite(integrand, 0.0, 4.0, 1e-10, {1.0}).value;
      value += quad::integrate_oscillatory_tail(cluster_ft, delta, 4.0, 1e-10,
                                                quad::Oscillation::cosine)
                   .value;
      break;
    }
  }
  return 2.0 / rho * value;
}

double y2_two_particle_direct_egue(double r, double local_density) {
  if (!(local_density > 0.0))
    throw std::invalid_argument("y2_two_particle_direct_egue: density <= 0");
  const double delta = std::abs(r) / local_density;
  auto sinc2 = [](double x) {
    if (x == 0.0) return 1.0;
    const double s = std::sin(kPi * x) / (kPi * x);
    return s * s;
  };
  const double span = 150.0;
  auto integrand = [&](double x) { return sinc2(x) * sinc2(delta - x); };
  const double conv =
      quad::integrate_finite(integrand, -span, span + delta, 1e-9).value;
  return (2.0 * sinc2(delta) - conv) / local_density;
}

double delta3_from_sigma2(const std::function<double(double)>& sigma2,
                          double r, double tol) {
  if (!(r > 0.0))
    throw std::invalid_argument("delta3_from_sigma2: r must be > 0");
  auto integrand = [&](double s) {
    return (r * r * r - 2.0 * r * r * s + s * s * s) * sigma2(s);
  };
  // the kernel scales like r^4; keep the requested tolerance on Delta3 itself
  const double value =
      quad::integrate_finite(integrand, 0.0, r, 0.5 * tol * r * r * r * r)
          .value;
  return 2.0 / (r * r * r * r) * value;
}

double delta3_from_sigma2(const AnalyticModel& model, double r) {
  return delta3_from_sigma2(
      [&model](double s) { return s == 0.0 ? 0.0 : sigma2_closed(s, model); },
      r, 1e-8);
}

double delta3_saturation(const AnalyticModel& model) {
  return 0.5 * sigma2_saturation(model);
}

double gaussian_sigma2(double r, BetaKind beta, double tol) {
  auto f = [beta](double k) { return 1.0 - b2_one_particle(k, beta); };
  const double edge = b2_support_edge(beta);
  if (edge > 0.0) return sigma2_quadrature(r, f, {1.0, edge}, edge, tol);
  return sigma2_quadrature(r, f, {1.0}, 40.0, tol);
}

}  // namespace ege::analytic
