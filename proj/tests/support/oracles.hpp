// Test-only reference computations. Nothing here calls into the library's
// numerical code paths, so they can serve as independent checks.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>

namespace hibreak::testing {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps,
                               double fa, double fm, double fb, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, eps / 2.0, fa, flm, fm, left, depth - 1) +
         adaptive_simpson(f, m, b, eps / 2.0, fm, frm, fb, right, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, eps, fa, fm, fb, whole, 50);
}

inline double student_t_density(double t, double df) {
  const double c = std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df)) / std::sqrt(df * std::numbers::pi);
  return c * std::pow(1.0 + t * t / df, -0.5 * (df + 1.0));
}

inline double student_t_cdf_by_quadrature(double t, double df) {
  const double half = integrate([df](double u) { return student_t_density(u, df); }, 0.0, std::abs(t));
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

// Chi-square CDF by quadrature after x = u², which removes the df = 1
// singularity at the origin.
inline double chi2_cdf_by_quadrature(double x, double df) {
  const double k = 0.5 * df;
  const double log_c = -k * std::numbers::ln2 - std::lgamma(k);
  auto g = [&](double u) {
    if (u == 0.0) return df == 1.0 ? 2.0 * std::exp(log_c) : 0.0;
    const double v = u * u;
    return 2.0 * u * std::exp(log_c + (k - 1.0) * std::log(v) - 0.5 * v);
  };
  return integrate(g, 0.0, std::sqrt(x));
}

template <class F>
double bisect_increasing(F f, double target, double lo, double hi, int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double erf_normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)); }

}  // namespace hibreak::testing
