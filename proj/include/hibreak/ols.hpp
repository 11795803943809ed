#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hibreak/dataset.hpp"
#include "hibreak/matrix.hpp"

namespace hibreak {

/// OLS coefficients with the inference panel of a regression table.
///
/// `residuals` covers the rows actually used, in dataset order. Without an
/// intercept, R² is taken against the uncentered total sum of squares and F
/// has K numerator degrees of freedom; with one, TSS is centered and F has
/// K - 1.
struct RegressionFit {
  std::vector<std::string> terms;
  bool has_intercept = true;
  Vector coefficients;
  Vector standard_errors;
  Vector t_values;
  Vector p_values;
  Vector residuals;
  double sigma = 0.0;
  double r_squared = 0.0;
  double f_value = 0.0;
  std::size_t n_used = 0;
  std::vector<std::string> dropped_labels;

  std::size_t df_residual() const noexcept { return n_used - coefficients.size(); }

  friend bool operator==(const RegressionFit&, const RegressionFit&) = default;
};

/// coeff / se; ±inf (or 0 for a zero coefficient) when se is 0.
double t_statistic(double coefficient, double standard_error) noexcept;

RegressionFit fit_ols(const Dataset& data, const std::set<std::string>& exclude = {});

/// Xβ̂ for every row of `data`, matching columns by the fit's term names.
/// Throws ColumnMismatch if a term is absent or the intercept flag differs.
Vector predict(const RegressionFit& fit, const Dataset& data);

/// Least-squares coefficients on the listed rows of (x, y). Columns are
/// equilibrated before the normal-equations solve. Throws RankDeficient.
Vector least_squares(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows);

}  // namespace hibreak
