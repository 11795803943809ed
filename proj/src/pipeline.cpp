#include "hibreak/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "hibreak/errors.hpp"
#include "hibreak/oracle.hpp"

namespace hibreak {

namespace {

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string drop_reason(const DiagnosticRecord& r, const DiagnosticThresholds& t) {
  const std::string res = "|standardized LTS residual| " + fixed4(std::abs(r.standardized_residual));
  if (r.classification == Classification::BadLeverage) {
    return "BadLeverage: " + res + " >= " + fixed4(t.residual_cutoff) + " and robust distance " +
           fixed4(r.robust_distance) + " >= " + fixed4(r.distance_cutoff);
  }
  return "VerticalOutlier: " + res + " >= severe cutoff " + fixed4(t.severe_residual_cutoff);
}

}  // namespace

const char* to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Markdown: return "markdown";
    case OutputFormat::Tsv: return "tsv";
  }
  return "markdown";
}

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "markdown") return OutputFormat::Markdown;
  if (name == "tsv") return OutputFormat::Tsv;
  throw Error(ErrorCode::InvalidArgument, "unknown output format '" + std::string(name) + "'");
}

AnalysisReport run_analysis(const Dataset& input, const AnalysisConfig& config) {
  config.thresholds.validate();
  const Dataset data = input.model() == config.model
                           ? input
                           : Dataset(input.row_labels(), input.column_names(), input.values(), config.model);
  const std::size_t p = data.n_predictors();
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "the analysis needs at least one predictor column");

  AnalysisReport report;
  report.ols_fit = run_stage("ols", [&] { return fit_ols(data); });
  const LtsFit lts = run_stage("lts", [&] { return fit_lts(data, config.lts); });
  const Matrix predictors = data.predictor_matrix();
  const McdEstimate mcd = run_stage("mcd", [&] { return fit_mcd(predictors, config.mcd); });
  report.diagnostics = run_stage("diagnostics", [&] { return classify_all(lts, mcd, data, config.thresholds); });

  std::set<std::string> exclude;
  for (const auto& rec : report.diagnostics) {
    if (rec.drop_recommended) {
      exclude.insert(rec.row_label);
      report.dropped.push_back(DroppedRow{rec.row_label, drop_reason(rec, config.thresholds)});
    }
  }
  report.robust_fit = run_stage("refit", [&] { return fit_ols(data, exclude); });

  const auto& o = report.ols_fit;
  const auto& r = report.robust_fit;
  for (std::size_t j = 0; j < o.terms.size(); ++j) {
    report.comparison.push_back(ComparisonRow{o.terms[j], o.coefficients[j], o.standard_errors[j], o.t_values[j],
                                              o.p_values[j], r.coefficients[j], r.standard_errors[j],
                                              r.t_values[j], r.p_values[j]});
  }

  report.lts = LtsSummary{lts.coefficients, lts.objective, lts.robust_scale, lts.zero_scale, lts.converged,
                          lts.n_csteps_total};
  report.mcd = McdSummary{mcd.center, mcd.raw_determinant, mcd.exact_fit, mcd.converged, mcd.n_csteps_total};

  ConfigEcho& e = report.config_echo;
  e.model = data.model();
  e.n_rows = data.n();
  e.leverage_dimension = p;
  e.lts_alpha = config.lts.alpha;
  e.lts_h = lts.h;
  e.lts_n_starts = config.lts.n_starts;
  e.lts_n_best_kept = config.lts.n_best_kept;
  e.lts_max_csteps = config.lts.max_csteps;
  e.lts_seed = config.lts.seed;
  e.lts_start_mode = lts.exhaustive_starts ? "exhaustive" : "random";
  e.lts_consistency_factor = lts.consistency_factor;
  e.mcd_h_fraction = config.mcd.h_fraction;
  e.mcd_h = mcd.h;
  e.mcd_n_starts = config.mcd.n_starts;
  e.mcd_n_best_kept = config.mcd.n_best_kept;
  e.mcd_max_csteps = config.mcd.max_csteps;
  e.mcd_seed = config.mcd.seed;
  e.mcd_start_mode = mcd.exhaustive_starts ? "exhaustive" : "random";
  e.mcd_consistency_factor = mcd.consistency_factor;
  e.residual_cutoff = config.thresholds.residual_cutoff;
  e.severe_residual_cutoff = config.thresholds.severe_residual_cutoff;
  e.distance_quantile = config.thresholds.distance_quantile;
  e.distance_cutoff = distance_cutoff(config.thresholds, p);
  e.drop_policy = "BadLeverage always; VerticalOutlier when |residual| >= severe cutoff";
  e.output_format = to_string(config.output_format);
  e.oracle = config.run_oracle;

  if (config.run_oracle) {
    OracleCheck check;
    const OracleResult exact_l = run_stage("oracle", [&] { return exact_lts(data, lts.h); });
    const OracleResult exact_m = run_stage("oracle", [&] { return exact_mcd(predictors, mcd.h); });
    check.lts_search_objective = lts.objective;
    check.lts_exact_objective = exact_l.best_objective;
    check.lts_subsets = exact_l.n_subsets_evaluated;
    check.mcd_search_determinant = mcd.raw_determinant;
    check.mcd_exact_determinant = exact_m.best_objective;
    check.mcd_subsets = exact_m.n_subsets_evaluated;
    report.oracle = check;
  }
  return report;
}

}  // namespace hibreak
