// hibreak: OLS versus high-breakdown robust regression on a CSV dataset.
//
// Exit codes: 0 success, 2 input/parse error, 3 numerical failure,
// 4 bad command-line flags.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hibreak/errors.hpp"
#include "hibreak/pipeline.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitFlags = 4;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-breakdown robust regression diagnostics (LTS + MCD)"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Compare OLS with OLS after removing damaging points");
  std::string csv_path;
  std::string response;
  std::string predictors;
  bool no_intercept = false;
  hibreak::AnalysisConfig config;
  std::size_t starts = config.lts.n_starts;
  std::uint64_t seed = config.lts.seed;
  std::string format = "markdown";
  std::string plot_path;

  analyze->add_option("csv", csv_path, "Input CSV (header row, labels in the first column)")->required();
  analyze->add_option("--response", response, "Response column")->required();
  analyze->add_option("--predictors", predictors, "Comma-separated predictor columns")->required();
  analyze->add_flag("--no-intercept", no_intercept, "Fit without a constant term");
  analyze->add_option("--alpha", config.lts.alpha, "LTS trimming fraction in [0, 0.5]")
      ->capture_default_str();
  analyze->add_option("--mcd-h", config.mcd.h_fraction, "MCD subset fraction in (0.5, 1]")->capture_default_str();
  analyze->add_option("--resid-cutoff", config.thresholds.residual_cutoff, "Standardized residual cutoff")
      ->capture_default_str();
  analyze->add_option("--severe-cutoff", config.thresholds.severe_residual_cutoff,
                      "Residual beyond which vertical outliers are dropped")
      ->capture_default_str();
  analyze->add_option("--distance-quantile", config.thresholds.distance_quantile,
                      "Chi-square quantile for the robust distance cutoff")
      ->capture_default_str();
  auto* seed_opt = analyze->add_option("--seed", seed, "Seed for random starts (LTS and MCD)")->capture_default_str();
  analyze->add_option("--starts", starts, "Number of random starts (LTS and MCD)")->capture_default_str();
  analyze->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "markdown", "tsv"}))
      ->capture_default_str();
  analyze->add_option("--plot-data", plot_path, "Write outlier-map data as JSON to this path");
  analyze->add_flag("--oracle", config.run_oracle, "Also run the exhaustive subset search (small inputs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFlags;
  }

  config.model = hibreak::ModelSpec{response, split_list(predictors), !no_intercept};
  config.lts.n_starts = starts;
  config.mcd.n_starts = starts;
  if (seed_opt->count() > 0) {
    config.lts.seed = seed;
    config.mcd.seed = seed;
  }

  try {
    config.output_format = hibreak::parse_output_format(format);
    config.thresholds.validate();
    if (!(config.lts.alpha >= 0.0 && config.lts.alpha <= 0.5)) {
      throw hibreak::Error(hibreak::ErrorCode::InvalidArgument, "--alpha must lie in [0, 0.5]");
    }
    if (!(config.mcd.h_fraction > 0.5 && config.mcd.h_fraction <= 1.0)) {
      throw hibreak::Error(hibreak::ErrorCode::InvalidArgument, "--mcd-h must lie in (0.5, 1]");
    }
    if (starts == 0) throw hibreak::Error(hibreak::ErrorCode::InvalidArgument, "--starts must be positive");
    if (config.model.predictors.empty()) {
      throw hibreak::Error(hibreak::ErrorCode::InvalidArgument, "--predictors must name at least one column");
    }
  } catch (const hibreak::Error& e) {
    std::cerr << "hibreak: " << e.what() << "\n";
    return kExitFlags;
  }

  try {
    const hibreak::Dataset data = hibreak::load_csv(csv_path, config.model);
    const hibreak::AnalysisReport report = hibreak::run_analysis(data, config);
    std::cout << hibreak::render_report(report, config.output_format);
    if (!plot_path.empty()) {
      std::ofstream out(plot_path);
      if (!out) throw hibreak::Error(hibreak::ErrorCode::FileNotFound, "cannot write '" + plot_path + "'");
      out << hibreak::outlier_map(report.diagnostics, config.thresholds).to_json() << "\n";
    }
  } catch (const hibreak::Error& e) {
    std::cerr << "hibreak: " << e.what() << "\n";
    if (e.code() == hibreak::ErrorCode::InvalidArgument) return kExitFlags;
    return hibreak::is_input_error(e.code()) ? kExitInput : kExitNumerical;
  }
  return 0;
}
