#include "ege/specfun.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ege/quadrature.hpp"

namespace ege::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kEps = 2.220446049250313e-16;

// Power-series seam for Si/Ci. Below it the alternating series keeps ~12
// significant digits; above it the E1(ix) continued fraction has converged.
constexpr double kSiCiSeam = 9.0;

struct SiCi {
  double si;
  double ci;
};

SiCi sici_series(double x) {
  // Si(x) = sum (-1)^k x^{2k+1} / ((2k+1)(2k+1)!)
  // Cin(x) = sum_{k>=1} (-1)^{k+1} x^{2k} / (2k (2k)!), Ci = gamma + ln x - Cin
  const double z = x * x;
  double term = x;
  double si = x;
  double cin = 0.0;
  double cterm = 1.0;
  for (int k = 1; k < 80; ++k) {
    cterm *= -z / ((2.0 * k - 1.0) * (2.0 * k));
    cin += -cterm / (2.0 * k);
    term *= -z / ((2.0 * k) * (2.0 * k + 1.0));
    si += term / (2.0 * k + 1.0);
    if (std::abs(term) < kEps * std::abs(si) &&
        std::abs(cterm) < kEps * std::max(std::abs(cin), 1.0))
      break;
  }
  return {si, euler_gamma + std::log(x) - cin};
}

// E1(i x) by the modified Lentz continued fraction,
//   E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))),
// then Ci(x) = -Re E1(ix), Si(x) = pi/2 + Im E1(ix).
SiCi sici_asymptotic(double x) {
  const std::complex<double> z(0.0, x);
  const double tiny = 1e-290;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i <= 200; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const std::complex<double> delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  const std::complex<double> e1 = h * std::exp(-z);
  return {kPi / 2.0 + e1.imag(), -e1.real()};
}

SiCi sici(double x) {
  return x <= kSiCiSeam ? sici_series(x) : sici_asymptotic(x);
}

}  // namespace

double sine_integral(double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  const double s = sici(ax).si;
  return x > 0.0 ? s : -s;
}

double cosine_integral(double x) {
  if (!(x > 0.0))
    throw std::domain_error("cosine_integral: requires x > 0");
  return sici(x).ci;
}

double hyp2f3_series(double a1, double a2, double b1, double b2, double b3,
                     double x, int max_terms) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < max_terms; ++k) {
    const double dk = static_cast<double>(k);
    term *= (a1 + dk) * (a2 + dk) /
            ((b1 + dk) * (b2 + dk) * (b3 + dk) * (dk + 1.0)) * x;
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum) && k > 2) return sum;
  }
  throw std::runtime_error("hyp2f3_series: no convergence within max_terms");
}

double hyp2f3_half(double x) {
  if (x == 0.0) return 1.0;
  // Alternating-series cancellation grows like e^{2 sqrt(-x)}; below -50 the
  // integral representation (1/2) int_0^1 log^2(t) cos(2 sqrt(-x) t) dt wins.
  if (x >= -50.0) return hyp2f3_series(0.5, 0.5, 1.5, 1.5, 1.5, x);

  const double a = 2.0 * std::sqrt(-x);
  auto f = [a](double t) {
    const double lt = std::log(t);
    return lt * lt * std::cos(a * t);
  };
  auto r = ege::quadrature::integrate_finite(f, 0.0, 1.0, 1e-12, {});
  return 0.5 * r.value;
}

namespace {

double dilog_series(double x) {
  // |x| <= 0.5
  double sum = 0.0;
  double p = 1.0;
  for (int k = 1; k < 60; ++k) {
    p *= x;
    const double term = p / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double dilog(double x) {
  constexpr double pi2_6 = kPi * kPi / 6.0;
  if (x > 1.0) throw std::domain_error("dilog: requires x <= 1");
  if (x == 1.0) return pi2_6;
  if (x == 0.0) return 0.0;
  if (x < -1.0) {
    // inversion: Li2(x) = -Li2(1/x) - pi^2/6 - log^2(-x)/2
    const double lx = std::log(-x);
    return -dilog(1.0 / x) - pi2_6 - 0.5 * lx * lx;
  }
  if (x < -0.5) {
    // Landen: Li2(x) = -Li2(x/(x-1)) - log^2(1-x)/2
    const double l = std::log1p(-x);
    return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
  }
  if (x <= 0.5) return dilog_series(x);
  // reflection: Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x)
  return pi2_6 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
}

}  // namespace ege::specfun
