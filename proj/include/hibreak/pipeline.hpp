#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "hibreak/dataset.hpp"
#include "hibreak/diagnostics.hpp"
#include "hibreak/lts.hpp"
#include "hibreak/mcd.hpp"
#include "hibreak/ols.hpp"

namespace hibreak {

enum class OutputFormat { Json, Markdown, Tsv };

const char* to_string(OutputFormat f) noexcept;
OutputFormat parse_output_format(std::string_view name);

struct AnalysisConfig {
  ModelSpec model;
  LtsConfig lts;
  McdConfig mcd;
  DiagnosticThresholds thresholds;
  OutputFormat output_format = OutputFormat::Markdown;
  /// Also run the exhaustive LTS/MCD searches (small inputs only).
  bool run_oracle = false;
};

/// Reads a comma-separated file: header row, row labels in the first
/// column, decimal numbers elsewhere. Quoted fields are supported.
Dataset load_csv(const std::filesystem::path& path, const ModelSpec& model);
Dataset parse_csv(std::istream& in, const ModelSpec& model);

struct DroppedRow {
  std::string label;
  std::string reason;

  friend bool operator==(const DroppedRow&, const DroppedRow&) = default;
};

struct ComparisonRow {
  std::string term;
  double ols_coeff = 0.0, ols_se = 0.0, ols_t = 0.0, ols_p = 0.0;
  double robust_coeff = 0.0, robust_se = 0.0, robust_t = 0.0, robust_p = 0.0;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

/// Every setting the analysis ran with, defaults included.
struct ConfigEcho {
  ModelSpec model;
  std::size_t n_rows = 0;
  std::size_t leverage_dimension = 0;

  double lts_alpha = 0.0;
  std::size_t lts_h = 0;
  std::size_t lts_n_starts = 0;
  std::size_t lts_n_best_kept = 0;
  std::size_t lts_max_csteps = 0;
  std::uint64_t lts_seed = 0;
  std::string lts_start_mode;
  double lts_consistency_factor = 1.0;

  double mcd_h_fraction = 0.0;
  std::size_t mcd_h = 0;
  std::size_t mcd_n_starts = 0;
  std::size_t mcd_n_best_kept = 0;
  std::size_t mcd_max_csteps = 0;
  std::uint64_t mcd_seed = 0;
  std::string mcd_start_mode;
  double mcd_consistency_factor = 1.0;
  std::string mcd_reweighting = "off";

  double residual_cutoff = 0.0;
  double severe_residual_cutoff = 0.0;
  double distance_quantile = 0.0;
  double distance_cutoff = 0.0;
  std::string drop_policy;
  std::string output_format;
  bool oracle = false;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct LtsSummary {
  Vector coefficients;
  double objective = 0.0;
  double robust_scale = 0.0;
  bool zero_scale = false;
  bool converged = false;
  std::size_t n_csteps_total = 0;

  friend bool operator==(const LtsSummary&, const LtsSummary&) = default;
};

struct McdSummary {
  Vector center;
  double raw_determinant = 0.0;
  bool exact_fit = false;
  bool converged = false;
  std::size_t n_csteps_total = 0;

  friend bool operator==(const McdSummary&, const McdSummary&) = default;
};

struct OracleCheck {
  double lts_search_objective = 0.0;
  double lts_exact_objective = 0.0;
  std::uint64_t lts_subsets = 0;
  double mcd_search_determinant = 0.0;
  double mcd_exact_determinant = 0.0;
  std::uint64_t mcd_subsets = 0;

  friend bool operator==(const OracleCheck&, const OracleCheck&) = default;
};

struct AnalysisReport {
  RegressionFit ols_fit;
  std::vector<DiagnosticRecord> diagnostics;
  std::vector<DroppedRow> dropped;
  RegressionFit robust_fit;
  ConfigEcho config_echo;
  std::vector<ComparisonRow> comparison;
  LtsSummary lts;
  McdSummary mcd;
  std::optional<OracleCheck> oracle;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// OLS on all rows, LTS, MCD on the predictor columns, classification,
/// removal of the rows recommended for dropping, and the OLS refit.
/// Stage failures are rethrown with the stage name prefixed and the
/// original error code kept.
AnalysisReport run_analysis(const Dataset& data, const AnalysisConfig& config);

std::string render_report(const AnalysisReport& report, OutputFormat format);

nlohmann::ordered_json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::ordered_json& j);

}  // namespace hibreak
