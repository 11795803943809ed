#include "hibreak/ols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hibreak/core_stats.hpp"
#include "hibreak/errors.hpp"

namespace hibreak {

namespace {

struct NormalSolution {
  Vector beta;
  Vector inverse_diagonal;  // diag((XᵀX)⁻¹)
};

NormalSolution solve_normal_equations(const Matrix& x, std::span<const double> y,
                                      std::span<const std::size_t> rows, bool want_inverse) {
  const std::size_t k = x.cols();
  if (rows.size() < k) throw Error(ErrorCode::RankDeficient, "fewer rows than coefficients");
  Vector scale(k, 0.0);
  for (std::size_t r : rows)
    for (std::size_t j = 0; j < k; ++j) scale[j] += x(r, j) * x(r, j);
  for (std::size_t j = 0; j < k; ++j) {
    if (!(scale[j] > 0.0)) throw Error(ErrorCode::RankDeficient, "design column is identically zero");
    scale[j] = 1.0 / std::sqrt(scale[j]);
  }
  Matrix xtx(k, k);
  Vector xty(k, 0.0);
  Vector xs(k);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < k; ++j) xs[j] = x(r, j) * scale[j];
    for (std::size_t i = 0; i < k; ++i) {
      xty[i] += xs[i] * y[r];
      for (std::size_t j = 0; j <= i; ++j) xtx(i, j) += xs[i] * xs[j];
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx(j, i) = xtx(i, j);

  try {
    const Cholesky chol(xtx);
    NormalSolution out;
    out.beta = chol.solve(xty);
    for (std::size_t j = 0; j < k; ++j) out.beta[j] *= scale[j];
    if (want_inverse) {
      const Matrix inv = chol.inverse();
      out.inverse_diagonal.resize(k);
      for (std::size_t j = 0; j < k; ++j) out.inverse_diagonal[j] = inv(j, j) * scale[j] * scale[j];
    }
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) {
      throw Error(ErrorCode::RankDeficient, "design matrix is rank deficient (collinear regressors)");
    }
    throw;
  }
}

}  // namespace

double t_statistic(double coefficient, double standard_error) noexcept {
  if (standard_error > 0.0) return coefficient / standard_error;
  if (coefficient == 0.0) return 0.0;
  return std::copysign(std::numeric_limits<double>::infinity(), coefficient);
}

Vector least_squares(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows) {
  return solve_normal_equations(x, y, rows, false).beta;
}

RegressionFit fit_ols(const Dataset& data, const std::set<std::string>& exclude) {
  for (const auto& label : exclude) {
    if (!data.row_index(label)) {
      throw Error(ErrorCode::InvalidArgument, "cannot exclude unknown row '" + label + "'");
    }
  }
  const Matrix x = data.design();
  const Vector y = data.response();
  const std::size_t k = x.cols();

  RegressionFit fit;
  fit.terms = data.term_names();
  fit.has_intercept = data.model().intercept;

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (exclude.contains(data.row_labels()[i])) {
      fit.dropped_labels.push_back(data.row_labels()[i]);
    } else {
      rows.push_back(i);
    }
  }
  const std::size_t n = rows.size();
  if (n < k + 1) {
    throw Error(ErrorCode::TooFewRows, "OLS needs at least " + std::to_string(k + 1) + " rows, have " +
                                           std::to_string(n));
  }

  const NormalSolution sol = solve_normal_equations(x, y, rows, true);
  fit.coefficients = sol.beta;
  fit.n_used = n;

  double rss = 0.0;
  double y_mean = 0.0;
  fit.residuals.reserve(n);
  for (std::size_t r : rows) {
    const double e = y[r] - dot(x.row(r), fit.coefficients);
    fit.residuals.push_back(e);
    rss += e * e;
    y_mean += y[r];
  }
  y_mean /= static_cast<double>(n);
  double tss = 0.0;
  for (std::size_t r : rows) {
    const double d = fit.has_intercept ? y[r] - y_mean : y[r];
    tss += d * d;
  }
  rss = std::min(rss, tss);

  const double df = static_cast<double>(n - k);
  const double sigma2 = rss / df;
  fit.sigma = std::sqrt(sigma2);
  fit.standard_errors.resize(k);
  fit.t_values.resize(k);
  fit.p_values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    fit.standard_errors[j] = std::sqrt(sigma2 * sol.inverse_diagonal[j]);
    fit.t_values[j] = t_statistic(fit.coefficients[j], fit.standard_errors[j]);
    fit.p_values[j] = std::clamp(student_t_two_sided_p(fit.t_values[j], df), 0.0, 1.0);
  }

  if (tss > 0.0) {
    fit.r_squared = std::clamp(1.0 - rss / tss, 0.0, 1.0);
  } else {
    fit.r_squared = rss == 0.0 ? 1.0 : 0.0;
  }
  const std::size_t df_model = fit.has_intercept ? k - 1 : k;
  if (df_model == 0) {
    fit.f_value = 0.0;
  } else if (rss > 0.0) {
    fit.f_value = ((tss - rss) / static_cast<double>(df_model)) / sigma2;
  } else {
    fit.f_value = tss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return fit;
}

Vector predict(const RegressionFit& fit, const Dataset& data) {
  std::vector<std::size_t> cols;
  const std::size_t offset = fit.has_intercept ? 1 : 0;
  if (fit.has_intercept && (fit.terms.empty() || fit.terms.front() != kInterceptName)) {
    throw Error(ErrorCode::ColumnMismatch, "fit terms do not start with the intercept");
  }
  for (std::size_t j = offset; j < fit.terms.size(); ++j) {
    auto idx = data.column_index(fit.terms[j]);
    if (!idx) throw Error(ErrorCode::ColumnMismatch, "dataset lacks predictor column '" + fit.terms[j] + "'");
    cols.push_back(*idx);
  }
  Vector out(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    double v = fit.has_intercept ? fit.coefficients[0] : 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) v += fit.coefficients[j + offset] * data.values()(i, cols[j]);
    out[i] = v;
  }
  return out;
}

}  // namespace hibreak
