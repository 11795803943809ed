#include "hibreak/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "hibreak/errors.hpp"

namespace hibreak {

Dataset::Dataset(std::vector<std::string> row_labels, std::vector<std::string> column_names,
                 Matrix values, ModelSpec model)
    : row_labels_(std::move(row_labels)),
      column_names_(std::move(column_names)),
      values_(std::move(values)),
      model_(std::move(model)) {
  if (row_labels_.size() != values_.rows() || column_names_.size() != values_.cols()) {
    throw Error(ErrorCode::LengthMismatch, "dataset labels do not match the value matrix shape");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : row_labels_) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::DuplicateLabel, "duplicate row label '" + label + "'");
    }
  }
  if (!values_.all_finite()) throw Error(ErrorCode::InvalidArgument, "dataset contains non-finite values");

  auto find = [this](const std::string& name) {
    auto idx = column_index(name);
    if (!idx) throw Error(ErrorCode::MissingColumn, "missing column '" + name + "'");
    return *idx;
  };
  response_col_ = find(model_.response);
  for (const auto& p : model_.predictors) {
    if (p == model_.response) {
      throw Error(ErrorCode::InvalidArgument, "response '" + p + "' is also listed as a predictor");
    }
    const std::size_t idx = find(p);
    if (std::find(predictor_cols_.begin(), predictor_cols_.end(), idx) != predictor_cols_.end()) {
      throw Error(ErrorCode::InvalidArgument, "predictor '" + p + "' listed twice");
    }
    predictor_cols_.push_back(idx);
  }
  if (model_.n_coefficients() == 0) throw Error(ErrorCode::InvalidArgument, "model has no terms");
  if (n() < model_.n_coefficients() + 1) {
    throw Error(ErrorCode::TooFewRows, "need at least " + std::to_string(model_.n_coefficients() + 1) +
                                           " rows, have " + std::to_string(n()));
  }
}

Dataset Dataset::from_xy(const Matrix& predictors, const Vector& y, bool intercept) {
  if (predictors.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "from_xy: row count mismatch");
  const std::size_t n = y.size();
  const std::size_t p = predictors.cols();
  Matrix values(n, p + 1);
  std::vector<std::string> columns;
  ModelSpec model{"y", {}, intercept};
  for (std::size_t j = 0; j < p; ++j) {
    columns.push_back("x" + std::to_string(j + 1));
    model.predictors.push_back(columns.back());
  }
  columns.push_back("y");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("r" + std::to_string(i + 1));
    for (std::size_t j = 0; j < p; ++j) values(i, j) = predictors(i, j);
    values(i, p) = y[i];
  }
  return Dataset(std::move(labels), std::move(columns), std::move(values), std::move(model));
}

std::optional<std::size_t> Dataset::column_index(const std::string& name) const {
  auto it = std::find(column_names_.begin(), column_names_.end(), name);
  if (it == column_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - column_names_.begin());
}

std::optional<std::size_t> Dataset::row_index(const std::string& label) const {
  auto it = std::find(row_labels_.begin(), row_labels_.end(), label);
  if (it == row_labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - row_labels_.begin());
}

std::vector<std::string> Dataset::term_names() const {
  std::vector<std::string> terms;
  if (model_.intercept) terms.emplace_back(kInterceptName);
  terms.insert(terms.end(), model_.predictors.begin(), model_.predictors.end());
  return terms;
}

Matrix Dataset::design() const {
  const std::size_t k = n_coefficients();
  const std::size_t offset = model_.intercept ? 1 : 0;
  Matrix x(n(), k);
  for (std::size_t i = 0; i < n(); ++i) {
    if (model_.intercept) x(i, 0) = 1.0;
    for (std::size_t j = 0; j < predictor_cols_.size(); ++j) x(i, j + offset) = values_(i, predictor_cols_[j]);
  }
  return x;
}

Vector Dataset::response() const { return values_.column(response_col_); }

Matrix Dataset::predictor_matrix() const { return values_.select_cols(predictor_cols_); }

Dataset Dataset::without_rows(const std::set<std::string>& labels) const {
  std::vector<std::size_t> keep;
  std::vector<std::string> kept_labels;
  for (std::size_t i = 0; i < n(); ++i) {
    if (!labels.contains(row_labels_[i])) {
      keep.push_back(i);
      kept_labels.push_back(row_labels_[i]);
    }
  }
  return Dataset(std::move(kept_labels), column_names_, values_.select_rows(keep), model_);
}

Dataset Dataset::with_response(const Vector& y) const {
  if (y.size() != n()) throw Error(ErrorCode::LengthMismatch, "with_response: length mismatch");
  Matrix values = values_;
  for (std::size_t i = 0; i < n(); ++i) values(i, response_col_) = y[i];
  return Dataset(row_labels_, column_names_, std::move(values), model_);
}

}  // namespace hibreak
