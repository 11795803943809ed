#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hibreak/matrix.hpp"

namespace hibreak {

/// Search settings for the minimum covariance determinant.
///
/// The subset size is floor(h_fraction * n) unless `subset_size` pins it.
/// Start selection mirrors LtsConfig: all (p + 1)-subsets when n <= 16 and
/// p <= 3, otherwise `n_starts` seeded random ones.
struct McdConfig {
  double h_fraction = 0.75;
  std::size_t n_starts = 500;
  std::size_t n_best_kept = 10;
  std::uint64_t seed = 19990101;
  std::size_t max_csteps = 100;
  std::optional<std::size_t> subset_size;

  friend bool operator==(const McdConfig&, const McdConfig&) = default;
};

struct McdEstimate {
  Vector center;
  /// Consistency-corrected scatter, used for the robust distances.
  Matrix scatter;
  /// Classical covariance (n - 1 denominator) of the best subset.
  Matrix raw_scatter;
  std::vector<std::size_t> best_subset;
  double raw_determinant = 0.0;
  double consistency_factor = 1.0;
  Vector robust_distances;
  std::size_t h = 0;
  /// The best h rows lie on a hyperplane. The determinant is 0 and rows off
  /// that hyperplane get an infinite distance.
  bool exact_fit = false;
  std::size_t n_csteps_total = 0;
  bool converged = false;
  bool exhaustive_starts = false;
  std::size_t n_trials = 0;
};

struct McdStep {
  Vector center;
  Matrix scatter;
  std::vector<std::size_t> subset;
  double determinant = 0.0;
};

std::size_t mcd_subset_size(std::size_t n, std::size_t p, double h_fraction);

/// q / F_{χ²(p+2)}(χ²_q(p)) with q = h/n; 1 when h = n.
double mcd_consistency_factor(std::size_t h, std::size_t n, std::size_t p);

/// One concentration step. Selects the h rows with the smallest Mahalanobis
/// distance under (center, scatter), ties to the lowest index, and returns
/// their classical mean and covariance.
///
/// When (center, scatter) are themselves the moments of an h-subset the
/// determinant cannot increase; a round-off-only increase returns the
/// input unchanged. Throws SingularSubset if the selected rows are
/// affinely dependent.
McdStep mcd_c_step(const Matrix& x, const Vector& center, const Matrix& scatter, std::size_t h);

McdEstimate fit_mcd(const Matrix& x, const McdConfig& config);

/// Mahalanobis distances of every row of `x` under the estimate's center
/// and consistency-corrected scatter.
Vector robust_distances(const Matrix& x, const McdEstimate& estimate);

}  // namespace hibreak
