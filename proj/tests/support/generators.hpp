#pragma once

#include <cstddef>
#include <random>

#include "hibreak/matrix.hpp"

namespace hibreak::testing {

struct Instance {
  Matrix x;  // design, intercept column first when requested
  Vector y;
};

/// y = x·β + N(0, sigma²) with a few gross outliers mixed in.
inline Instance random_regression(std::mt19937_64& rng, std::size_t n, std::size_t k, bool intercept = true,
                                  double outlier_share = 0.2, double sigma = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst{Matrix(n, k), Vector(n)};
  Vector beta(k);
  for (double& b : beta) b = 3.0 * gauss(rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) inst.x(i, j) = (intercept && j == 0) ? 1.0 : 5.0 * gauss(rng);
    inst.y[i] = dot(inst.x.row(i), beta) + sigma * gauss(rng);
    if (unit(rng) < outlier_share) inst.y[i] += 30.0 + 20.0 * unit(rng);
  }
  return inst;
}

/// Gaussian cloud with a minority shifted far away.
inline Matrix random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t p, double outlier_share = 0.2) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix x(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const bool far = unit(rng) < outlier_share;
    for (std::size_t j = 0; j < p; ++j) x(i, j) = gauss(rng) + (j > 0 ? 0.5 * x(i, 0) : 0.0) + (far ? 8.0 : 0.0);
  }
  return x;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

inline Matrix random_spd(std::mt19937_64& rng, std::size_t n) {
  const Matrix m = random_matrix(rng, n, n);
  return m.transpose() * m + Matrix::identity(n);
}

}  // namespace hibreak::testing
