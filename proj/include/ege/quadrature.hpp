#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Adaptive Gauss-Kronrod quadrature plus an oscillatory-tail integrator.
// Both are deterministic: identical inputs give bit-identical results.

namespace ege::quadrature {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult best)
      : std::runtime_error(what), best_result(best) {}
  QuadratureResult best_result;
};

using Integrand = std::function<double(double)>;

/// Integrate f over [a, b] to absolute tolerance tol. The interval is split
/// at the listed singular/kink points before adaptive G7-K15 bisection; the
/// rule never evaluates interval endpoints, so integrable endpoint
/// singularities are fine. Throws QuadratureError (carrying the best
/// estimate) when the evaluation budget is exhausted before reaching tol.
QuadratureResult integrate_finite(const Integrand& f, double a, double b,
                                  double tol = 1e-8,
                                  const std::vector<double>& singular_points = {},
                                  long max_evaluations = 2'000'000);

enum class Oscillation {
  sin_sq,  // integrand = envelope(k) * sin^2(pi * freq * k)
  cosine,  // integrand = envelope(k) * cos(2 pi * freq * k)
};

/// Integrate envelope(k) * osc(k) over [a, inf), a > 0. The envelope must be
/// smooth and decay at least as k^-2 (checked coarsely; violations throw
/// std::invalid_argument). freq == 0 integrates the bare envelope via the
/// u = a/k transformation. For freq > 0 the oscillatory part is summed
/// between consecutive zeros with Euler acceleration of the alternating
/// cell sums.
QuadratureResult integrate_oscillatory_tail(const Integrand& envelope,
                                            double phase_frequency, double a,
                                            double tol = 1e-8,
                                            Oscillation kind = Oscillation::sin_sq,
                                            long max_evaluations = 2'000'000);

}  // namespace ege::quadrature
