#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hibreak/matrix.hpp"

namespace hibreak {

/// Name of the intercept term in coefficient tables.
inline constexpr const char* kInterceptName = "Const";

struct ModelSpec {
  std::string response;
  std::vector<std::string> predictors;
  bool intercept = true;

  std::size_t n_coefficients() const noexcept { return predictors.size() + (intercept ? 1 : 0); }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Labelled observations plus the regression model to fit on them.
///
/// Construction validates everything the estimators rely on: unique row
/// labels, finite values, referenced columns present, response not used as
/// a predictor, and n >= K + 1.
class Dataset {
 public:
  Dataset(std::vector<std::string> row_labels, std::vector<std::string> column_names, Matrix values,
          ModelSpec model);

  /// Synthetic dataset with predictors x1..xp, response y and labels r1..rn.
  static Dataset from_xy(const Matrix& predictors, const Vector& y, bool intercept = true);

  std::size_t n() const noexcept { return values_.rows(); }
  std::size_t n_coefficients() const noexcept { return model_.n_coefficients(); }
  std::size_t n_predictors() const noexcept { return model_.predictors.size(); }

  const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
  const std::vector<std::string>& column_names() const noexcept { return column_names_; }
  const Matrix& values() const noexcept { return values_; }
  const ModelSpec& model() const noexcept { return model_; }

  std::optional<std::size_t> column_index(const std::string& name) const;
  std::optional<std::size_t> row_index(const std::string& label) const;

  /// Regression terms in design-column order (intercept first when present).
  std::vector<std::string> term_names() const;

  /// n x K design matrix, intercept column first.
  Matrix design() const;
  Vector response() const;
  /// n x p matrix of the predictor columns, intercept excluded.
  Matrix predictor_matrix() const;

  /// Copy with the labelled rows physically removed.
  Dataset without_rows(const std::set<std::string>& labels) const;
  /// Same observations, different response vector.
  Dataset with_response(const Vector& y) const;

 private:
  std::vector<std::string> row_labels_;
  std::vector<std::string> column_names_;
  Matrix values_;
  ModelSpec model_;
  std::size_t response_col_ = 0;
  std::vector<std::size_t> predictor_cols_;
};

}  // namespace hibreak
