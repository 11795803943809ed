#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hibreak {

using Vector = std::vector<double>;

/// Dense row-major matrix. Rows of a design matrix are observations.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  Vector column(std::size_t c) const;
  const std::vector<double>& data() const noexcept { return data_; }

  Matrix transpose() const;
  Matrix select_rows(std::span<const std::size_t> indices) const;
  Matrix select_cols(std::span<const std::size_t> indices) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> v) noexcept;
double max_abs(const Matrix& a) noexcept;

}  // namespace hibreak
