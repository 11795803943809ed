#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hibreak/dataset.hpp"
#include "hibreak/matrix.hpp"

namespace hibreak {

/// Search settings for least trimmed squares.
///
/// The trimmed sum keeps h = n - floor(alpha * n) squared residuals, never
/// fewer than K + 1. Small problems (n <= 16, K <= 3) use every
/// (K + 1)-row subset as a start; otherwise `n_starts` random subsets are
/// drawn from a generator seeded with `seed`.
struct LtsConfig {
  double alpha = 0.25;
  std::size_t n_starts = 500;
  std::size_t n_best_kept = 10;
  std::uint64_t seed = 19980101;
  std::size_t max_csteps = 100;

  friend bool operator==(const LtsConfig&, const LtsConfig&) = default;
};

struct LtsFit {
  Vector coefficients;
  double objective = 0.0;
  std::size_t h = 0;
  std::vector<std::size_t> h_subset;
  Vector raw_residuals;
  double consistency_factor = 1.0;
  double robust_scale = 0.0;
  Vector standardized_residuals;
  /// Exact fit: the objective vanished, standardized residuals are 0 on
  /// the subset and ±inf elsewhere.
  bool zero_scale = false;
  std::size_t n_csteps_total = 0;
  bool converged = false;
  bool exhaustive_starts = false;
  std::size_t n_trials = 0;
};

struct LtsStep {
  Vector beta;
  double objective = 0.0;
  std::vector<std::size_t> subset;
};

struct StandardizedResiduals {
  double robust_scale = 0.0;
  Vector standardized;
  bool zero_scale = false;
};

std::size_t lts_subset_size(std::size_t n, std::size_t n_coefficients, double alpha);

/// Whether a search over n rows in `dim` dimensions enumerates all
/// (dim + 1)-subsets as starts instead of sampling them.
bool uses_exhaustive_starts(std::size_t n, std::size_t dim) noexcept;

/// Sum of the h smallest squared residuals of y - Xβ.
double lts_objective(const Matrix& x, std::span<const double> y, std::span<const double> beta, std::size_t h);
double lts_objective(const Dataset& data, std::span<const double> beta, std::size_t h);

/// One concentration step: keep the h rows best fitted by `beta` (ties to
/// the lowest index) and refit OLS on exactly those rows, which are
/// returned as `subset`. The returned objective never exceeds
/// lts_objective(beta, h); if round-off alone would make the refit
/// marginally worse, `beta` is returned unchanged.
/// Throws RankDeficientSubset when the selected rows are collinear.
LtsStep lts_c_step(const Matrix& x, std::span<const double> y, std::span<const double> beta, std::size_t h);
LtsStep lts_c_step(const Dataset& data, std::span<const double> beta, std::size_t h);

/// Gaussian consistency factor for the trimmed scale: 1/sqrt(1 - 2kφ(k)/q)
/// with q = h/n and k = Φ⁻¹((q + 1)/2). Equals 1 when h = n.
double lts_consistency_factor(std::size_t h, std::size_t n);

/// robust_scale = c(h, n) * sqrt(objective / h); standardized = raw / scale.
/// An objective at or below h * (1e-12 * response_scale)² is an exact fit.
StandardizedResiduals standardize_residuals(std::span<const double> raw_residuals, double objective,
                                            std::span<const std::size_t> h_subset, std::size_t h,
                                            double response_scale);

LtsFit fit_lts(const Matrix& x, std::span<const double> y, const LtsConfig& config);
LtsFit fit_lts(const Dataset& data, const LtsConfig& config);

}  // namespace hibreak
