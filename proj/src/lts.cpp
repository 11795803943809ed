#include "hibreak/lts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hibreak/core_stats.hpp"
#include "hibreak/errors.hpp"
#include "hibreak/ols.hpp"
#include "hibreak/subsets.hpp"

namespace hibreak {

namespace {

Vector squared_residuals(const Matrix& x, std::span<const double> y, std::span<const double> beta) {
  if (beta.size() != x.cols() || y.size() != x.rows()) {
    throw Error(ErrorCode::LengthMismatch, "LTS: coefficient or response length mismatch");
  }
  Vector r2(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double e = y[i] - dot(x.row(i), beta);
    r2[i] = e * e;
  }
  return r2;
}

double sum_over(std::span<const double> v, std::span<const std::size_t> idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += v[i];
  return s;
}

struct Trial {
  double objective;
  std::size_t index;
  LtsStep state;
};

bool trial_less(const Trial& a, const Trial& b) {
  return a.objective < b.objective || (a.objective == b.objective && a.index < b.index);
}

}  // namespace

std::size_t lts_subset_size(std::size_t n, std::size_t n_coefficients, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "LTS alpha must lie in [0, 0.5]");
  }
  if (n < n_coefficients + 1) throw Error(ErrorCode::TooFewRows, "LTS needs n >= K + 1");
  const auto trimmed = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
  return std::max(n - trimmed, n_coefficients + 1);
}

bool uses_exhaustive_starts(std::size_t n, std::size_t dim) noexcept { return n <= 16 && dim <= 3; }

double lts_objective(const Matrix& x, std::span<const double> y, std::span<const double> beta,
                     std::size_t h) {
  if (h == 0 || h > x.rows()) throw Error(ErrorCode::InvalidArgument, "LTS objective: h out of range");
  const Vector r2 = squared_residuals(x, y, beta);
  return sum_over(r2, smallest_indices(r2, h));
}

double lts_objective(const Dataset& data, std::span<const double> beta, std::size_t h) {
  return lts_objective(data.design(), data.response(), beta, h);
}

LtsStep lts_c_step(const Matrix& x, std::span<const double> y, std::span<const double> beta,
                   std::size_t h) {
  if (h < x.cols() + 1 || h > x.rows()) throw Error(ErrorCode::InvalidArgument, "C-step: h out of range");
  const Vector r2 = squared_residuals(x, y, beta);
  std::vector<std::size_t> subset = smallest_indices(r2, h);
  const double old_objective = sum_over(r2, subset);

  LtsStep next;
  try {
    next.beta = least_squares(x, y, subset);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) {
      throw Error(ErrorCode::RankDeficientSubset, "C-step selected a collinear subset");
    }
    throw;
  }
  next.objective = lts_objective(x, y, next.beta, h);
  if (next.objective > old_objective && next.objective - old_objective <= 1e-10 * old_objective) {
    next.beta.assign(beta.begin(), beta.end());
    next.objective = old_objective;
  }
  next.subset = std::move(subset);
  return next;
}

LtsStep lts_c_step(const Dataset& data, std::span<const double> beta, std::size_t h) {
  return lts_c_step(data.design(), data.response(), beta, h);
}

double lts_consistency_factor(std::size_t h, std::size_t n) {
  if (h == 0 || h > n) throw Error(ErrorCode::InvalidArgument, "consistency factor: h out of range");
  if (h == n) return 1.0;
  const double q = static_cast<double>(h) / static_cast<double>(n);
  const double k = gaussian_quantile(0.5 * (q + 1.0));
  return 1.0 / std::sqrt(1.0 - 2.0 * k * normal_pdf(k) / q);
}

StandardizedResiduals standardize_residuals(std::span<const double> raw_residuals, double objective,
                                            std::span<const std::size_t> h_subset, std::size_t h,
                                            double response_scale) {
  const std::size_t n = raw_residuals.size();
  StandardizedResiduals out;
  out.standardized.assign(n, 0.0);
  const double exact_tol = 1e-12 * response_scale;
  if (objective <= static_cast<double>(h) * exact_tol * exact_tol) {
    out.zero_scale = true;
    std::vector<bool> in_subset(n, false);
    for (std::size_t i : h_subset) in_subset[i] = true;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_subset[i] && std::abs(raw_residuals[i]) > 1e-9 * response_scale) {
        out.standardized[i] = std::copysign(inf, raw_residuals[i]);
      }
    }
    return out;
  }
  out.robust_scale = lts_consistency_factor(h, n) * std::sqrt(objective / static_cast<double>(h));
  for (std::size_t i = 0; i < n; ++i) out.standardized[i] = raw_residuals[i] / out.robust_scale;
  return out;
}

LtsFit fit_lts(const Matrix& x, std::span<const double> y, const LtsConfig& config) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "fit_lts: response length mismatch");
  if (config.n_starts == 0 || config.n_best_kept == 0 || config.max_csteps == 0) {
    throw Error(ErrorCode::InvalidArgument, "fit_lts: n_starts, n_best_kept and max_csteps must be positive");
  }
  const std::size_t h = lts_subset_size(n, k, config.alpha);

  LtsFit fit;
  fit.h = h;
  fit.exhaustive_starts = uses_exhaustive_starts(n, k);

  LtsStep best;
  if (h == n) {
    // No trimming: the unique optimum is the full OLS fit.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    try {
      best.beta = least_squares(x, y, all);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::RankDeficient) {
        throw Error(ErrorCode::AllStartsDegenerate, "fit_lts: the full design is rank deficient");
      }
      throw;
    }
    best.subset = std::move(all);
    fit.converged = true;
    fit.n_trials = 1;
  } else {
    std::vector<std::vector<std::size_t>> starts;
    if (fit.exhaustive_starts) {
      starts = all_combinations(n, k + 1);
    } else {
      std::mt19937_64 rng(config.seed);
      starts.reserve(config.n_starts);
      for (std::size_t s = 0; s < config.n_starts; ++s) starts.push_back(random_subset(rng, n, k + 1));
    }

    std::vector<Trial> trials;
    trials.reserve(starts.size());
    for (std::size_t t = 0; t < starts.size(); ++t) {
      try {
        LtsStep state{least_squares(x, y, starts[t]), 0.0, {}};
        for (int step = 0; step < 2; ++step) {
          state = lts_c_step(x, y, state.beta, h);
          ++fit.n_csteps_total;
        }
        trials.push_back(Trial{state.objective, t, std::move(state)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient && e.code() != ErrorCode::RankDeficientSubset) throw;
      }
    }
    if (trials.empty()) throw Error(ErrorCode::AllStartsDegenerate, "fit_lts: every start was degenerate");
    fit.n_trials = trials.size();

    std::sort(trials.begin(), trials.end(), trial_less);
    std::vector<Trial> kept;
    for (auto& trial : trials) {
      if (kept.size() == config.n_best_kept) break;
      const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Trial& other) {
        return other.state.subset == trial.state.subset;
      });
      if (!duplicate) kept.push_back(std::move(trial));
    }

    std::vector<bool> kept_converged(kept.size(), false);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      Trial& trial = kept[i];
      try {
        for (std::size_t step = 0; step < config.max_csteps; ++step) {
          LtsStep next = lts_c_step(x, y, trial.state.beta, h);
          ++fit.n_csteps_total;
          const bool flat = trial.state.objective - next.objective <= 1e-12 * trial.state.objective;
          trial.state = std::move(next);
          trial.objective = trial.state.objective;
          if (flat) {
            kept_converged[i] = true;
            break;
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficientSubset) throw;
        trial.objective = std::numeric_limits<double>::infinity();
      }
    }
    std::size_t winner = 0;
    for (std::size_t i = 1; i < kept.size(); ++i)
      if (trial_less(kept[i], kept[winner])) winner = i;
    if (!std::isfinite(kept[winner].objective)) {
      throw Error(ErrorCode::AllStartsDegenerate, "fit_lts: every kept trial became degenerate");
    }
    best = std::move(kept[winner].state);
    fit.converged = kept_converged[winner];
  }

  fit.coefficients = best.beta;
  fit.raw_residuals.resize(n);
  Vector r2(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.raw_residuals[i] = y[i] - dot(x.row(i), fit.coefficients);
    r2[i] = fit.raw_residuals[i] * fit.raw_residuals[i];
  }
  fit.h_subset = smallest_indices(r2, h);
  fit.objective = sum_over(r2, fit.h_subset);
  fit.consistency_factor = lts_consistency_factor(h, n);

  double response_scale = 0.0;
  for (double v : y) response_scale = std::max(response_scale, std::abs(v));
  StandardizedResiduals sr =
      standardize_residuals(fit.raw_residuals, fit.objective, fit.h_subset, h, response_scale);
  fit.robust_scale = sr.robust_scale;
  fit.standardized_residuals = std::move(sr.standardized);
  fit.zero_scale = sr.zero_scale;
  return fit;
}

LtsFit fit_lts(const Dataset& data, const LtsConfig& config) {
  return fit_lts(data.design(), data.response(), config);
}

}  // namespace hibreak
