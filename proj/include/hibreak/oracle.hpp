#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hibreak/dataset.hpp"
#include "hibreak/matrix.hpp"

namespace hibreak {

/// Exhaustive-search result. For LTS `coefficients` holds β of the best
/// subset and `scatter` is empty; for MCD `coefficients` is the subset mean
/// and `scatter` its covariance.
struct OracleResult {
  std::vector<std::size_t> best_subset;
  double best_objective = 0.0;
  Vector coefficients;
  Matrix scatter;
  std::uint64_t n_subsets_evaluated = 0;
};

inline constexpr std::uint64_t kMaxOracleSubsets = 1'000'000;

/// Global LTS minimum by fitting OLS on every h-subset (lexicographic
/// order, first subset wins ties). Collinear subsets are skipped.
/// Throws TooLarge past 10^6 subsets, AllSubsetsDegenerate if none is usable.
OracleResult exact_lts(const Matrix& x, std::span<const double> y, std::size_t h);
OracleResult exact_lts(const Dataset& data, std::size_t h);

/// Global MCD minimum: smallest classical-covariance determinant over all
/// h-subsets. Singular subsets are skipped.
OracleResult exact_mcd(const Matrix& x, std::size_t h);

}  // namespace hibreak
