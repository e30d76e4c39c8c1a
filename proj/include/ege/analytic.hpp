#pragma once

#include <functional>
#include <vector>

#include "ege/ensembles.hpp"

// Closed-form spectral statistics for two-particle embedded ensembles:
// one-particle form factors b2, the squared two-particle form factor, number
// variance in closed form and by quadrature of the form-factor integral,
// saturation values, small-r expansions, the two-particle cluster function,
// heuristic low-frequency-cutoff models, and the Sigma^2 -> Delta3 transform.
//
// All densities enter through the local mean two-particle density
// R1^(2)(xi) > 0; Delta = r / R1^(2).

namespace ege::analytic {

struct AnalyticModel {
  enum class Kind { egue, egse, egoe, poisson_cutoff, gxe_cutoff };

  Kind kind = Kind::egue;
  double local_density = 1.0;         // R1^(2)(xi); EG*E variants
  double delta = 0.0;                 // frequency cutoff; cutoff variants
  BetaKind beta = BetaKind::unitary;  // gxe_cutoff

  static AnalyticModel egue(double local_density);
  static AnalyticModel egse(double local_density);
  static AnalyticModel egoe(double local_density);
  static AnalyticModel for_beta(BetaKind beta, double local_density);
  static AnalyticModel poisson_cutoff(double delta);
  static AnalyticModel gxe_cutoff(double delta, BetaKind beta);

  bool is_embedded() const {
    return kind == Kind::egue || kind == Kind::egse || kind == Kind::egoe;
  }
  void validate() const;
};

std::string to_string(AnalyticModel::Kind kind);

/// One-particle two-level form factor b2(k) for the Gaussian ensembles.
/// b2(0) = 1, b2 -> 0 for large |k|. For beta = 4 the value diverges to
/// -infinity at |k| = 1 (logarithmic singularity, integrable in every use).
double b2_one_particle(double k, BetaKind beta);

/// Two-point form factor of the two-particle spectrum:
/// [1 - b2(k R1)]^2 for the embedded ensembles, the sharp cutoff for
/// poisson_cutoff, and 1 - b2(k) above the cutoff for gxe_cutoff.
double f2_two_particle(double k, const AnalyticModel& model);

/// Finite-window expectation of the Fourier form-factor estimator: the
/// analytic form factor smoothed by the Fejer kernel of a window of total
/// (unfolded) width window_width. Converges to f2_two_particle for
/// k >> 1/window_width; at small k it captures the resolution limit any
/// finite window imposes on the estimate.
double f2_two_particle_windowed(double k, const AnalyticModel& model,
                                double window_width);

/// Number variance from the closed-form expressions (sine/cosine integrals,
/// 2F3, and for the orthogonal case a residual double integral plus the
/// slowly-decaying sigma correction evaluated numerically). r > 0.
double sigma2_closed(double r, const AnalyticModel& model);

/// The orthogonal-ensemble closed form with the sigma correction dropped
/// (the approximation whose error the full form quantifies).
double sigma2_closed_egoe_without_sigma(double r, const AnalyticModel& model);

/// Number variance as the form-factor integral
///   Sigma^2(r) = int F(k) (sin(pi k r)/(pi k))^2 dk
/// with the F == 1 tail split off in closed form. `kinks` lists
/// discontinuities or integrable singularities of F; `tail_start` is a point
/// beyond which F is 1 (or differs from 1 by a O(k^-2) residual, which is
/// integrated separately). tail_start == 0 probes for the support edge.
double sigma2_quadrature(double r,
                         const std::function<double(double)>& form_factor,
                         const std::vector<double>& kinks = {},
                         double tail_start = 0.0, double tol = 1e-8);

/// Model-aware convenience: passes the exact kinks and support edges.
double sigma2_quadrature(double r, const AnalyticModel& model,
                         double tol = 1e-8);

/// Large-r saturation value. Closed forms for the embedded ensembles and the
/// Poisson cutoff; the gxe cutoff integrates g(k)/(2 pi^2 k^2) numerically.
/// Diverges (throws std::domain_error) as delta -> 0: plain Poisson and
/// Gaussian ensembles do not saturate.
double sigma2_saturation(const AnalyticModel& model);

/// Saturation by direct quadrature of F(k)/(2 pi^2 k^2) (the independent
/// route; also the definition used by the cutoff models).
double sigma2_saturation_quadrature(const AnalyticModel& model,
                                    double tol = 1e-10);

/// Two-term small-r expansion r - c2 r^2 / R1. c2 is 4/3 (unitary), 28/27
/// (symplectic), and computed numerically for the orthogonal case.
double sigma2_small_r(double r, const AnalyticModel& model);

/// Quadratic small-r coefficient c2 = 2 - 2 int_0^inf b2(k)^2 dk.
double small_r_coefficient(BetaKind beta);

/// Two-particle cluster function Y2^(2)(r; xi) by Fourier inversion of
/// 1 - F2^(2). Embedded ensembles only.
double y2_two_particle(double r, const AnalyticModel& model);

/// Independent real-space route for the unitary case:
/// (1/R)[2 Y2(Delta) - (Y2 * Y2)(Delta)] with Y2(x) = (sin pi x / pi x)^2
/// and the convolution integrated directly.
double y2_two_particle_direct_egue(double r, double local_density);

/// Rigidity transform Delta3(r) = (2/r^4) int_0^r (r^3 - 2 r^2 s + s^3)
/// Sigma^2(s) ds, and its saturation Delta3_sat = Sigma^2_sat / 2.
double delta3_from_sigma2(const std::function<double(double)>& sigma2,
                          double r, double tol = 1e-10);
double delta3_from_sigma2(const AnalyticModel& model, double r);
double delta3_saturation(const AnalyticModel& model);

/// Number variance of the plain one-particle Gaussian ensembles (the delta=0
/// reference curve for the cutoff models).
double gaussian_sigma2(double r, BetaKind beta, double tol = 1e-9);

}  // namespace ege::analytic
