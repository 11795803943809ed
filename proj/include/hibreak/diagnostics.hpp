#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hibreak/dataset.hpp"
#include "hibreak/lts.hpp"
#include "hibreak/mcd.hpp"

namespace hibreak {

enum class Classification { Regular, VerticalOutlier, GoodLeverage, BadLeverage };

const char* to_string(Classification c) noexcept;
Classification classification_from_string(std::string_view name);

struct DiagnosticThresholds {
  double residual_cutoff = 2.5;
  double distance_quantile = 0.975;
  double severe_residual_cutoff = 4.0;

  void validate() const;

  friend bool operator==(const DiagnosticThresholds&, const DiagnosticThresholds&) = default;
};

struct DiagnosticRecord {
  std::string row_label;
  double standardized_residual = 0.0;
  double robust_distance = 0.0;
  double distance_cutoff = 0.0;
  Classification classification = Classification::Regular;
  bool drop_recommended = false;

  friend bool operator==(const DiagnosticRecord&, const DiagnosticRecord&) = default;
};

/// sqrt(χ²_q(p)) for the configured distance quantile q.
double distance_cutoff(const DiagnosticThresholds& thresholds, std::size_t p);

/// Places one observation in the outlier map. Both cutoffs are closed on
/// the outlying side: |r| >= residual_cutoff is a large residual and
/// distance >= distance_cutoff is a leverage point. Bad leverage points are
/// always recommended for removal; vertical outliers only once |r| reaches
/// the severe cutoff.
DiagnosticRecord classify(double standardized_residual, double robust_distance,
                          const DiagnosticThresholds& thresholds, std::size_t p,
                          std::string row_label = {});

/// One record per dataset row, in row order. p is taken from the MCD center.
std::vector<DiagnosticRecord> classify_all(const LtsFit& lts, const McdEstimate& mcd, const Dataset& data,
                                           const DiagnosticThresholds& thresholds);

struct PlotPoint {
  std::string label;
  double robust_distance = 0.0;
  double standardized_residual = 0.0;
  Classification classification = Classification::Regular;
};

/// Standardized residual versus robust distance, with the vertical line
/// x = rd_cutoff and the horizontal band y = ±sr_cutoff.
struct PlotData {
  std::vector<PlotPoint> points;
  double rd_cutoff = 0.0;
  double sr_cutoff = 0.0;

  std::string to_json() const;
  std::string to_tsv() const;
};

PlotData outlier_map(const std::vector<DiagnosticRecord>& records, const DiagnosticThresholds& thresholds);

}  // namespace hibreak
