#pragma once

// Real special functions used by the closed-form number-variance expressions:
// sine/cosine integrals, the 2F3(1/2,1/2; 3/2,3/2,3/2; x) hypergeometric and
// the dilogarithm. All functions are pure and thread-safe.

namespace ege::specfun {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

/// Si(x) = int_0^x sin(t)/t dt. Odd, total; Si(x) -> pi/2 as x -> +inf.
double sine_integral(double x);

/// Ci(x) = -int_x^inf cos(t)/t dt for x > 0. Throws std::domain_error for
/// x <= 0 (logarithmic singularity at the origin).
double cosine_integral(double x);

/// 2F3(1/2,1/2; 3/2,3/2,3/2; x). Series for moderate |x|; for large negative
/// x the equivalent integral form (1/2) int_0^1 log(t)^2 cos(2 sqrt(-x) t) dt
/// is used to avoid cancellation. Throws ege::quadrature::QuadratureError if
/// the fallback integral fails to converge.
double hyp2f3_half(double x);

/// Dilogarithm Li2(x) for x <= 1; throws std::domain_error for x > 1.
double dilog(double x);

// Generic 2F3 series entry point (all parameters explicit). Converges for any
// finite x in exact arithmetic; in doubles it is only trustworthy while the
// terms do not overwhelm the result, so prefer hyp2f3_half for the hardened
// parameter set. Throws std::runtime_error if max_terms is exhausted.
double hyp2f3_series(double a1, double a2, double b1, double b2, double b3,
                     double x, int max_terms = 400);

}  // namespace ege::specfun
