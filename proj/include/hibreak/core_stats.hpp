#pragma once

#include <cstddef>
#include <span>

#include "hibreak/matrix.hpp"

namespace hibreak {

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// Construction throws NotPositiveDefinite when a pivot falls to or below
/// `relative_pivot_tolerance * max(diag(a))`, which is how collinear
/// regressors surface. Asymmetric input beyond 1e-10 relative is rejected
/// with InvalidArgument.
class Cholesky {
 public:
  static constexpr double kDefaultPivotTolerance = 1e-12;

  explicit Cholesky(const Matrix& a, double relative_pivot_tolerance = kDefaultPivotTolerance);

  std::size_t dim() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

  Vector solve(std::span<const double> b) const;
  Matrix inverse() const;
  double determinant() const noexcept;
  double log_determinant() const noexcept;

  /// dᵀ A⁻¹ d, via one forward substitution.
  double quadratic_form_inverse(std::span<const double> d) const;

 private:
  Vector forward(std::span<const double> b) const;
  Vector backward(std::span<const double> z) const;

  Matrix lower_;
};

/// Factorization of a covariance matrix after rescaling it to unit
/// diagonal, so the singularity test does not depend on the units of the
/// variables. Throws NotPositiveDefinite for a zero variance or a
/// correlation pivot at or below 1e-12.
class CovarianceFactor {
 public:
  explicit CovarianceFactor(const Matrix& scatter);

  std::size_t dim() const noexcept { return scale_.size(); }
  double determinant() const noexcept;
  /// (d)ᵀ scatter⁻¹ (d).
  double mahalanobis_squared(std::span<const double> d) const;

 private:
  Vector scale_;
  Cholesky correlation_;
};

Vector solve_spd(const Matrix& a, std::span<const double> b);

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;

/// Regularized incomplete beta I_x(a, b). `one_minus_x` is passed separately
/// so callers can keep full precision near x = 1.
double regularized_incomplete_beta(double a, double b, double x, double one_minus_x);
double regularized_incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x).
double regularized_lower_gamma(double a, double x);

double student_t_cdf(double t, double df);

/// Two-sided tail probability P(|T| >= |t|), computed without cancellation.
double student_t_two_sided_p(double t, double df);

double chi2_cdf(double x, double df);

// Both quantiles throw DomainError for p outside (0, 1).
double chi2_quantile(double p, double df);
double gaussian_quantile(double p);

struct Moments {
  Vector center;
  Matrix scatter;
};

/// Column means and the n-1 denominator covariance of the rows of `x`.
Moments mean_and_cov(const Matrix& x);
Moments mean_and_cov(const Matrix& x, std::span<const std::size_t> rows);

/// LU determinant with partial pivoting; singular input returns ~0.
double determinant(const Matrix& a);

}  // namespace hibreak
