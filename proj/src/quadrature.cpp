#include "ege/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

namespace ege::quadrature {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
// (QUADPACK dqk15 nodes/weights).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct CellEstimate {
  double value = 0.0;
  double error = 0.0;
  bool at_floor = false;
};

CellEstimate gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fc = f(center);
  double result_gauss = fc * kWg[3];
  double result_kronrod = fc * kWgk[7];
  double resabs = std::abs(fc) * kWgk[7];
  double fv[15];
  fv[7] = fc;

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[j] = f1;
    fv[14 - j] = f2;
    result_kronrod += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
  }

  const double mean = result_kronrod * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

  double err = std::abs((result_kronrod - result_gauss) * half);
  resasc *= half;
  resabs *= half;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps_floor = 50.0 * 2.220446049250313e-16 * resabs;
  const bool at_floor = err <= eps_floor;
  err = std::max(err, eps_floor);

  return {result_kronrod * half, err, at_floor};
}

struct Interval {
  double a, b, value, error;
  bool at_floor;  // error is dominated by the roundoff floor; splitting cannot help
  long id;  // insertion order: strict-weak tie break keeps the heap deterministic
};

struct IntervalLess {
  bool operator()(const Interval& x, const Interval& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.id > y.id;
  }
};

}  // namespace

QuadratureResult integrate_finite(const Integrand& f, double a, double b,
                                  double tol,
                                  const std::vector<double>& singular_points,
                                  long max_evaluations) {
  if (!(a < b)) {
    if (a == b) return {0.0, 0.0, 0};
    QuadratureResult r = integrate_finite(f, b, a, tol, singular_points,
                                          max_evaluations);
    r.value = -r.value;
    return r;
  }

  std::vector<double> cuts{a, b};
  for (double s : singular_points)
    if (s > a && s < b) cuts.push_back(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Interval, std::vector<Interval>, IntervalLess> heap;
  long evals = 0;
  long next_id = 0;
  double total_value = 0.0;
  double total_error = 0.0;

  auto push = [&](double lo, double hi) {
    // cells at floating-point resolution have measure ~ulp: their
    // contribution is negligible even across integrable singularities, and
    // their nodes would collide with the singular endpoint
    if (hi - lo <= 8.0 * 2.220446049250313e-16 *
                       std::max(std::abs(lo), std::abs(hi)))
      return;
    CellEstimate e = gk15(f, lo, hi);
    evals += 15;
    total_value += e.value;
    total_error += e.error;
    heap.push({lo, hi, e.value, e.error, e.at_floor, next_id++});
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) push(cuts[i], cuts[i + 1]);

  while (total_error > tol) {
    if (heap.empty() || heap.top().at_floor)
      break;  // roundoff-limited: splitting further cannot reduce the error
    if (evals + 30 > max_evaluations) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "integrate_finite: budget exhausted (error %.3g > tol %.3g)",
                    total_error, tol);
      throw QuadratureError(msg, {total_value, total_error, evals});
    }
    Interval worst = heap.top();
    heap.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval at floating-point resolution; keep its estimate as-is
      total_value += worst.value;
      total_error += worst.error;
      break;
    }
    push(worst.a, mid);
    push(mid, worst.b);
  }

  return {total_value, total_error, evals};
}

namespace {

// Euler transformation of a (nearly) alternating series: repeated averaging
// of the partial-sum tableau. Returns the accelerated limit and a residual
// estimate from the last two tableau stages.
struct AcceleratedSum {
  double value;
  double residual;
};

AcceleratedSum euler_accelerate(const std::vector<double>& partial_sums) {
  std::vector<double> row = partial_sums;
  double best = row.back();
  double residual = std::abs(row.back() - row[row.size() - 2]);
  while (row.size() >= 2) {
    std::vector<double> next(row.size() - 1);
    for (std::size_t i = 0; i + 1 < row.size(); ++i)
      next[i] = 0.5 * (row[i] + row[i + 1]);
    const double change = std::abs(next.back() - best);
    if (change <= residual) {
      best = next.back();
      residual = change;
    }
    row.swap(next);
  }
  return {best, std::max(residual, 1e-300)};
}

}  // namespace

QuadratureResult integrate_oscillatory_tail(const Integrand& envelope,
                                            double phase_frequency, double a,
                                            double tol, Oscillation kind,
                                            long max_evaluations) {
  if (!(a > 0.0))
    throw std::invalid_argument("integrate_oscillatory_tail: requires a > 0");
  if (phase_frequency < 0.0)
    throw std::invalid_argument("integrate_oscillatory_tail: negative frequency");

  // Coarse decay check: |envelope| * k^2 should not grow along a geometric ladder.
  {
    const double g0 = std::abs(envelope(a)) * a * a;
    const double g1 = std::abs(envelope(64.0 * a)) * 64.0 * a * 64.0 * a;
    const double g2 = std::abs(envelope(4096.0 * a)) * 4096.0 * a * 4096.0 * a;
    const double scale = std::max(g0, 1e-300);
    if (g1 > 64.0 * scale || g2 > 64.0 * scale)
      throw std::invalid_argument(
          "integrate_oscillatory_tail: envelope does not decay like k^-2");
  }

  long evals = 3;

  // Smooth part: int_a^inf g = int_0^1 g(a/u) a/u^2 du.
  auto smooth_tail = [&](double tol_part) {
    auto transformed = [&](double u) {
      const double k = a / u;
      return envelope(k) * (a / (u * u));
    };
    return integrate_finite(transformed, 0.0, 1.0, tol_part, {},
                            max_evaluations - evals);
  };

  if (phase_frequency == 0.0) {
    QuadratureResult r = smooth_tail(tol);
    r.evaluations += evals;
    return r;
  }

  // Oscillatory part: sum cos-weighted cell integrals between consecutive
  // zeros of cos(2 pi f k), which alternate in sign, then accelerate.
  const double f = phase_frequency;
  auto cos_part = [&](double tol_part) -> QuadratureResult {
    const double cell = 1.0 / (2.0 * f);  // half period of cos(2 pi f k)
    // First zero of cos(2 pi f k) at or after a: k = (m + 1/2) / (2 f).
    const double m0 = std::ceil(2.0 * f * a - 0.5);
    double z = (m0 + 0.5) / (2.0 * f);
    if (z <= a) z += cell;

    auto integrand = [&](double k) {
      return envelope(k) * std::cos(2.0 * M_PI * f * k);
    };

    QuadratureResult head = integrate_finite(integrand, a, z, tol_part * 0.25,
                                             {}, max_evaluations - evals);
    long used = head.evaluations;

    std::vector<double> partial_sums;
    partial_sums.reserve(128);
    double running = head.value;
    double rule_error = head.abs_error_estimate;
    AcceleratedSum acc{running, 1e300};

    const int min_cells = 8;
    const int max_cells = 4000;
    int stable = 0;
    for (int m = 0; m < max_cells; ++m) {
      CellEstimate c = gk15(integrand, z, z + cell);
      used += 15;
      z += cell;
      running += c.value;
      rule_error += c.error;
      partial_sums.push_back(running);
      if (static_cast<int>(partial_sums.size()) >= min_cells) {
        acc = euler_accelerate(partial_sums);
        stable = acc.residual < tol_part * 0.25 ? stable + 1 : 0;
        if (stable >= 2)
          return {acc.value, 4.0 * acc.residual + rule_error, used};
      }
      if (used + 15 > max_evaluations - evals)
        throw QuadratureError(
            "integrate_oscillatory_tail: budget exhausted in oscillatory sum",
            {acc.value, acc.residual + rule_error, used});
    }
    throw QuadratureError(
        "integrate_oscillatory_tail: alternating sum did not converge",
        {acc.value, acc.residual + rule_error, used});
  };

  if (kind == Oscillation::cosine) {
    QuadratureResult r = cos_part(tol);
    r.evaluations += evals;
    return r;
  }

  // sin^2(pi f k) = 1/2 - cos(2 pi f k)/2
  QuadratureResult smooth = smooth_tail(tol * 0.5);
  evals += smooth.evaluations;
  QuadratureResult osc = cos_part(tol * 0.5);
  return {0.5 * smooth.value - 0.5 * osc.value,
          0.5 * smooth.abs_error_estimate + 0.5 * osc.abs_error_estimate,
          evals + osc.evaluations};
}

}  // namespace ege::quadrature
