#include "hibreak/oracle.hpp"

#include <limits>
#include <numeric>

#include "hibreak/core_stats.hpp"
#include "hibreak/errors.hpp"
#include "hibreak/lts.hpp"
#include "hibreak/ols.hpp"
#include "hibreak/subsets.hpp"

namespace hibreak {

namespace {

void check_size(std::size_t n, std::size_t h, std::size_t min_h) {
  if (h < min_h || h > n) throw Error(ErrorCode::InvalidArgument, "oracle: subset size out of range");
  if (binomial(n, h) > kMaxOracleSubsets) {
    throw Error(ErrorCode::TooLarge, "oracle: C(" + std::to_string(n) + ", " + std::to_string(h) +
                                         ") exceeds the enumeration limit");
  }
}

}  // namespace

OracleResult exact_lts(const Matrix& x, std::span<const double> y, std::size_t h) {
  const std::size_t n = x.rows();
  check_size(n, h, x.cols() + 1);
  OracleResult best;
  best.best_objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset(h);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  do {
    Vector beta;
    try {
      beta = least_squares(x, y, subset);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      continue;
    }
    ++best.n_subsets_evaluated;
    const double obj = lts_objective(x, y, beta, h);
    if (obj < best.best_objective) {
      best.best_objective = obj;
      best.best_subset = subset;
      best.coefficients = std::move(beta);
    }
  } while (next_combination(subset, n));
  if (best.n_subsets_evaluated == 0) throw Error(ErrorCode::AllSubsetsDegenerate, "exact_lts: every subset is collinear");
  return best;
}

OracleResult exact_lts(const Dataset& data, std::size_t h) {
  return exact_lts(data.design(), data.response(), h);
}

OracleResult exact_mcd(const Matrix& x, std::size_t h) {
  const std::size_t n = x.rows();
  check_size(n, h, x.cols() + 1);
  OracleResult best;
  best.best_objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> subset(h);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  do {
    Moments m = mean_and_cov(x, subset);
    double det;
    try {
      det = CovarianceFactor(m.scatter).determinant();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      continue;
    }
    ++best.n_subsets_evaluated;
    if (det < best.best_objective) {
      best.best_objective = det;
      best.best_subset = subset;
      best.coefficients = std::move(m.center);
      best.scatter = std::move(m.scatter);
    }
  } while (next_combination(subset, n));
  if (best.n_subsets_evaluated == 0) throw Error(ErrorCode::AllSubsetsDegenerate, "exact_mcd: every subset is singular");
  return best;
}

}  // namespace hibreak
