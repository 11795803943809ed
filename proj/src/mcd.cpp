#include "hibreak/mcd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hibreak/core_stats.hpp"
#include "hibreak/errors.hpp"
#include "hibreak/lts.hpp"
#include "hibreak/subsets.hpp"

namespace hibreak {

namespace {

struct RawStep {
  McdStep step;
  bool singular = false;
};

Vector squared_distances(const Matrix& x, const Vector& center, const CovarianceFactor& factor) {
  Vector d(x.cols());
  Vector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) d[j] = x(i, j) - center[j];
    out[i] = factor.mahalanobis_squared(d);
  }
  return out;
}

RawStep c_step_raw(const Matrix& x, const Vector& center, const Matrix& scatter, std::size_t h) {
  const CovarianceFactor factor(scatter);
  const double old_det = factor.determinant();
  std::vector<std::size_t> subset = smallest_indices(squared_distances(x, center, factor), h);

  Moments m = mean_and_cov(x, subset);
  RawStep out;
  try {
    const CovarianceFactor next(m.scatter);
    out.step = McdStep{std::move(m.center), std::move(m.scatter), std::move(subset), next.determinant()};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    out.singular = true;
    out.step = McdStep{std::move(m.center), std::move(m.scatter), std::move(subset), 0.0};
    return out;
  }
  if (out.step.determinant > old_det && out.step.determinant - old_det <= 1e-10 * old_det) {
    const std::vector<std::size_t> kept = smallest_indices(squared_distances(x, center, factor), h);
    out.step = McdStep{center, scatter, kept, old_det};
  }
  return out;
}

struct Trial {
  double determinant;
  std::size_t index;
  McdStep state;
};

bool trial_less(const Trial& a, const Trial& b) {
  return a.determinant < b.determinant || (a.determinant == b.determinant && a.index < b.index);
}

// Distances when the scatter is singular: rows inside the affine span of the
// best subset get the Mahalanobis distance within that span, others +inf.
Vector exact_fit_distances(const Matrix& x, const Vector& center, const Matrix& scatter) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const double inf = std::numeric_limits<double>::infinity();

  Vector range(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double lo = x(0, j);
    double hi = x(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    range[j] = hi - lo;
  }
  double max_diag = 0.0;
  for (std::size_t j = 0; j < p; ++j) max_diag = std::max(max_diag, scatter(j, j));

  std::vector<std::size_t> active;
  std::vector<std::size_t> flat;
  for (std::size_t j = 0; j < p; ++j) {
    if (scatter(j, j) > 1e-24 * max_diag && scatter(j, j) > 0.0) {
      active.push_back(j);
    } else {
      flat.push_back(j);
    }
  }
  const std::size_t a = active.size();
  Vector scale(a);
  for (std::size_t i = 0; i < a; ++i) scale[i] = std::sqrt(scatter(active[i], active[i]));

  // Pivoted Cholesky of the correlation matrix of the active columns.
  Matrix corr(a, a);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j)
      corr(i, j) = scatter(active[i], active[j]) / (scale[i] * scale[j]);
  std::vector<std::size_t> perm(a);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Matrix lower(a, a);
  Vector residual_diag(a);
  for (std::size_t i = 0; i < a; ++i) residual_diag[i] = corr(i, i);
  std::size_t rank = 0;
  for (; rank < a; ++rank) {
    std::size_t piv = rank;
    for (std::size_t i = rank + 1; i < a; ++i)
      if (residual_diag[perm[i]] > residual_diag[perm[piv]]) piv = i;
    if (residual_diag[perm[piv]] <= 1e-9) break;
    std::swap(perm[rank], perm[piv]);
    for (std::size_t c = 0; c < rank; ++c) std::swap(lower(rank, c), lower(piv, c));
    const double l = std::sqrt(residual_diag[perm[rank]]);
    lower(rank, rank) = l;
    for (std::size_t i = rank + 1; i < a; ++i) {
      double s = corr(perm[i], perm[rank]);
      for (std::size_t c = 0; c < rank; ++c) s -= lower(i, c) * lower(rank, c);
      lower(i, rank) = s / l;
      residual_diag[perm[i]] -= lower(i, rank) * lower(i, rank);
    }
  }

  Vector out(n, 0.0);
  Vector u(a);
  Vector z(rank);
  for (std::size_t r = 0; r < n; ++r) {
    bool off = false;
    for (std::size_t j : flat) {
      if (std::abs(x(r, j) - center[j]) > 1e-9 * range[j]) off = true;
    }
    if (off) {
      out[r] = inf;
      continue;
    }
    double unorm = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
      u[i] = (x(r, active[perm[i]]) - center[active[perm[i]]]) / scale[perm[i]];
      unorm += u[i] * u[i];
    }
    for (std::size_t i = 0; i < rank; ++i) {
      double s = u[i];
      for (std::size_t c = 0; c < i; ++c) s -= lower(i, c) * z[c];
      z[i] = s / lower(i, i);
    }
    const double tol = 1e-7 * std::max(1.0, std::sqrt(unorm));
    for (std::size_t i = rank; i < a && !off; ++i) {
      double s = u[i];
      for (std::size_t c = 0; c < rank; ++c) s -= lower(i, c) * z[c];
      if (std::abs(s) > tol) off = true;
    }
    out[r] = off ? inf : std::sqrt(dot(z, z));
  }
  return out;
}

}  // namespace

std::size_t mcd_subset_size(std::size_t n, std::size_t p, double h_fraction) {
  if (!(h_fraction > 0.5 && h_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "MCD h_fraction must lie in (0.5, 1]");
  }
  const auto h = static_cast<std::size_t>(std::floor(h_fraction * static_cast<double>(n)));
  if (h < p + 1) throw Error(ErrorCode::TooFewRows, "MCD subset size must be at least p + 1");
  return h;
}

double mcd_consistency_factor(std::size_t h, std::size_t n, std::size_t p) {
  if (h == 0 || h > n || p == 0) throw Error(ErrorCode::InvalidArgument, "MCD consistency factor: bad sizes");
  if (h == n) return 1.0;
  const double q = static_cast<double>(h) / static_cast<double>(n);
  const double dp = static_cast<double>(p);
  return q / chi2_cdf(chi2_quantile(q, dp), dp + 2.0);
}

McdStep mcd_c_step(const Matrix& x, const Vector& center, const Matrix& scatter, std::size_t h) {
  if (h < x.cols() + 1 || h > x.rows()) throw Error(ErrorCode::InvalidArgument, "MCD C-step: h out of range");
  if (center.size() != x.cols() || scatter.rows() != x.cols()) {
    throw Error(ErrorCode::LengthMismatch, "MCD C-step: dimension mismatch");
  }
  RawStep raw;
  try {
    raw = c_step_raw(x, center, scatter, h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite) {
      throw Error(ErrorCode::InvalidArgument, "MCD C-step: input scatter is not positive definite");
    }
    throw;
  }
  if (raw.singular) throw Error(ErrorCode::SingularSubset, "MCD C-step selected an affinely dependent subset");
  return std::move(raw.step);
}

McdEstimate fit_mcd(const Matrix& x, const McdConfig& config) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "fit_mcd: no columns");
  if (n < 2 * (p + 1)) throw Error(ErrorCode::TooFewRows, "fit_mcd needs n >= 2(p + 1)");
  if (!x.all_finite()) throw Error(ErrorCode::InvalidArgument, "fit_mcd: non-finite input");
  if (config.n_starts == 0 || config.n_best_kept == 0 || config.max_csteps == 0) {
    throw Error(ErrorCode::InvalidArgument, "fit_mcd: n_starts, n_best_kept and max_csteps must be positive");
  }
  for (std::size_t j = 0; j < p; ++j) {
    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i) constant = x(i, j) == x(0, j);
    if (constant) throw Error(ErrorCode::ConstantColumn, "fit_mcd: column " + std::to_string(j) + " is constant");
  }
  std::size_t h;
  if (config.subset_size) {
    h = *config.subset_size;
    if (h < p + 1 || h > n) throw Error(ErrorCode::InvalidArgument, "fit_mcd: subset size out of range");
  } else {
    h = mcd_subset_size(n, p, config.h_fraction);
  }

  McdEstimate est;
  est.h = h;
  est.exhaustive_starts = uses_exhaustive_starts(n, p);
  est.consistency_factor = mcd_consistency_factor(h, n, p);

  std::optional<McdStep> exact;  // first singular h-subset met, by trial order
  McdStep best;

  if (h == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    Moments m = mean_and_cov(x, all);
    try {
      const double det = CovarianceFactor(m.scatter).determinant();
      best = McdStep{std::move(m.center), std::move(m.scatter), std::move(all), det};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      exact = McdStep{std::move(m.center), std::move(m.scatter), std::move(all), 0.0};
    }
    est.converged = true;
    est.n_trials = 1;
  } else {
    std::vector<std::vector<std::size_t>> starts;
    if (est.exhaustive_starts) {
      starts = all_combinations(n, p + 1);
    } else {
      std::mt19937_64 rng(config.seed);
      starts.reserve(config.n_starts);
      for (std::size_t s = 0; s < config.n_starts; ++s) starts.push_back(random_subset(rng, n, p + 1));
    }

    std::vector<Trial> trials;
    for (std::size_t t = 0; t < starts.size() && !exact; ++t) {
      Moments m = mean_and_cov(x, starts[t]);
      McdStep state;
      try {
        const double det = CovarianceFactor(m.scatter).determinant();
        state = McdStep{std::move(m.center), std::move(m.scatter), starts[t], det};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        continue;
      }
      bool singular = false;
      for (int step = 0; step < 2; ++step) {
        RawStep raw = c_step_raw(x, state.center, state.scatter, h);
        ++est.n_csteps_total;
        state = std::move(raw.step);
        if (raw.singular) {
          singular = true;
          break;
        }
      }
      if (singular) {
        exact = std::move(state);
        break;
      }
      trials.push_back(Trial{state.determinant, t, std::move(state)});
    }
    est.n_trials = trials.size();

    if (!exact) {
      if (trials.empty()) throw Error(ErrorCode::AllStartsDegenerate, "fit_mcd: every start was degenerate");
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
      for (std::size_t i = 0; i < kept.size() && !exact; ++i) {
        Trial& trial = kept[i];
        for (std::size_t step = 0; step < config.max_csteps; ++step) {
          RawStep raw = c_step_raw(x, trial.state.center, trial.state.scatter, h);
          ++est.n_csteps_total;
          if (raw.singular) {
            exact = std::move(raw.step);
            break;
          }
          const bool flat = trial.state.determinant - raw.step.determinant <= 1e-12 * trial.state.determinant;
          trial.state = std::move(raw.step);
          trial.determinant = trial.state.determinant;
          if (flat) {
            kept_converged[i] = true;
            break;
          }
        }
      }
      if (!exact) {
        std::size_t winner = 0;
        for (std::size_t i = 1; i < kept.size(); ++i)
          if (trial_less(kept[i], kept[winner])) winner = i;
        best = std::move(kept[winner].state);
        est.converged = kept_converged[winner];
      }
    }
  }

  if (exact) {
    est.exact_fit = true;
    est.converged = true;
    best = std::move(*exact);
    best.determinant = 0.0;
  }
  est.center = std::move(best.center);
  est.raw_scatter = std::move(best.scatter);
  est.best_subset = std::move(best.subset);
  est.raw_determinant = best.determinant;
  est.scatter = est.consistency_factor * est.raw_scatter;
  est.robust_distances = robust_distances(x, est);
  return est;
}

Vector robust_distances(const Matrix& x, const McdEstimate& estimate) {
  if (x.cols() != estimate.center.size()) throw Error(ErrorCode::LengthMismatch, "robust_distances: dimension mismatch");
  if (estimate.exact_fit) return exact_fit_distances(x, estimate.center, estimate.scatter);
  const CovarianceFactor factor(estimate.scatter);
  Vector d2 = squared_distances(x, estimate.center, factor);
  for (double& v : d2) v = std::sqrt(std::max(v, 0.0));
  return d2;
}

}  // namespace hibreak
