#include "hibreak/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hibreak/errors.hpp"

namespace hibreak {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by continued fraction; valid for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::DomainError,
                std::string(what) + ": probability must lie in (0, 1), got " + std::to_string(p));
  }
}

// Bisection on a monotone CDF inside [lo, hi], then guarded Newton polish.
template <class Cdf, class Pdf>
double invert_cdf(double p, double lo, double hi, Cdf cdf, Pdf pdf) {
  for (int i = 0; i < 400 && hi - lo > 4 * kEps * std::max(1.0, std::abs(lo) + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double dens = pdf(x);
    if (!(dens > 0.0)) break;
    const double next = x - (cdf(x) - p) / dens;
    if (!(next >= lo && next <= hi)) break;
    if (std::abs(cdf(next) - p) > std::abs(cdf(x) - p)) break;
    x = next;
  }
  return x;
}

double chi2_pdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  const double k = 0.5 * df;
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - std::lgamma(k));
}

}  // namespace

Cholesky::Cholesky(const Matrix& a, double relative_pivot_tolerance) {
  if (!a.is_square() || a.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "Cholesky requires a non-empty square matrix");
  }
  const std::size_t n = a.rows();
  const double scale = max_abs(a);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, a(i, i));
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale) {
        throw Error(ErrorCode::InvalidArgument, "Cholesky input is not symmetric");
      }
    }
  }
  const double threshold = relative_pivot_tolerance * max_diag;
  lower_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lower_(j, k) * lower_(j, k);
    if (!(pivot > threshold) || !(max_diag > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "matrix is not positive definite (pivot " + std::to_string(j) + ")");
    }
    const double ljj = std::sqrt(pivot);
    lower_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = s / ljj;
    }
  }
}

Vector Cholesky::forward(std::span<const double> b) const {
  const std::size_t n = dim();
  if (b.size() != n) throw Error(ErrorCode::InvalidArgument, "Cholesky solve: dimension mismatch");
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * z[k];
    z[i] = s / lower_(i, i);
  }
  return z;
}

Vector Cholesky::backward(std::span<const double> z) const {
  const std::size_t n = dim();
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * x[k];
    x[ii] = s / lower_(ii, ii);
  }
  return x;
}

Vector Cholesky::solve(std::span<const double> b) const { return backward(forward(b)); }

Matrix Cholesky::inverse() const {
  const std::size_t n = dim();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  // Symmetrize away round-off.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

double Cholesky::determinant() const noexcept {
  double d = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) d *= lower_(i, i);
  return d * d;
}

double Cholesky::log_determinant() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(lower_(i, i));
  return 2.0 * s;
}

double Cholesky::quadratic_form_inverse(std::span<const double> d) const {
  const Vector z = forward(d);
  return dot(z, z);
}

namespace {

Matrix to_correlation(const Matrix& scatter, Vector& scale) {
  if (!scatter.is_square() || scatter.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "covariance must be a non-empty square matrix");
  }
  const std::size_t p = scatter.rows();
  scale.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (!(scatter(j, j) > 0.0) || !std::isfinite(scatter(j, j))) {
      throw Error(ErrorCode::NotPositiveDefinite, "covariance has a zero variance");
    }
    scale[j] = std::sqrt(scatter(j, j));
  }
  Matrix corr(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) corr(i, j) = scatter(i, j) / (scale[i] * scale[j]);
  return corr;
}

}  // namespace

CovarianceFactor::CovarianceFactor(const Matrix& scatter)
    : correlation_(to_correlation(scatter, scale_)) {}

double CovarianceFactor::determinant() const noexcept {
  double d = correlation_.determinant();
  for (double s : scale_) d *= s * s;
  return d;
}

double CovarianceFactor::mahalanobis_squared(std::span<const double> d) const {
  if (d.size() != dim()) throw Error(ErrorCode::InvalidArgument, "mahalanobis: dimension mismatch");
  Vector u(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) u[j] = d[j] / scale_[j];
  return correlation_.quadratic_form_inverse(u);
}

Vector solve_spd(const Matrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw Error(ErrorCode::InvalidArgument, "solve_spd: dimension mismatch");
  return Cholesky(a).solve(b);
}

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double regularized_incomplete_beta(double a, double b, double x, double one_minus_x) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::DomainError, "incomplete beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log(one_minus_x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw Error(ErrorCode::DomainError, "incomplete gamma: a must be > 0");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df >= 1.0)) throw Error(ErrorCode::DomainError, "student t: df must be >= 1");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double denom = df + t2;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / denom, t2 / denom);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double chi2_cdf(double x, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::DomainError, "chi-square: df must be > 0");
  return regularized_lower_gamma(0.5 * df, 0.5 * x);
}

double chi2_quantile(double p, double df) {
  require_probability(p, "chi2_quantile");
  if (!(df > 0.0)) throw Error(ErrorCode::DomainError, "chi2_quantile: df must be > 0");
  double hi = std::max(1.0, df);
  while (chi2_cdf(hi, df) < p) hi *= 2.0;
  return invert_cdf(
      p, 0.0, hi, [df](double x) { return chi2_cdf(x, df); },
      [df](double x) { return chi2_pdf(x, df); });
}

double gaussian_quantile(double p) {
  require_probability(p, "gaussian_quantile");
  if (p == 0.5) return 0.0;
  // Antisymmetric by construction: solve in the lower tail, where the CDF has
  // full relative precision, and reflect.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  const double x = invert_cdf(q, -40.0, 0.0, normal_cdf, normal_pdf);
  return upper ? -x : x;
}

Moments mean_and_cov(const Matrix& x, std::span<const std::size_t> rows) {
  const std::size_t n = rows.size();
  const std::size_t p = x.cols();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "mean_and_cov needs at least two rows");
  Moments m{Vector(p, 0.0), Matrix(p, p)};
  for (std::size_t r : rows)
    for (std::size_t j = 0; j < p; ++j) m.center[j] += x(r, j);
  for (double& c : m.center) c /= static_cast<double>(n);
  Vector d(p);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < p; ++j) d[j] = x(r, j) - m.center[j];
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j <= i; ++j) m.scatter(i, j) += d[i] * d[j];
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      m.scatter(i, j) /= denom;
      m.scatter(j, i) = m.scatter(i, j);
    }
  return m;
}

Moments mean_and_cov(const Matrix& x) {
  std::vector<std::size_t> all(x.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return mean_and_cov(x, all);
}

double determinant(const Matrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::InvalidArgument, "determinant of a non-square matrix");
  const std::size_t n = a.rows();
  Matrix lu = a;
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (lu(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      det = -det;
    }
    det *= lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }
  return det;
}

}  // namespace hibreak
