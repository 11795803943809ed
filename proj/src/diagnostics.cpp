#include "hibreak/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "hibreak/core_stats.hpp"
#include "hibreak/errors.hpp"
#include "hibreak/json_io.hpp"

namespace hibreak {

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Regular: return "Regular";
    case Classification::VerticalOutlier: return "VerticalOutlier";
    case Classification::GoodLeverage: return "GoodLeverage";
    case Classification::BadLeverage: return "BadLeverage";
  }
  return "Regular";
}

Classification classification_from_string(std::string_view name) {
  for (auto c : {Classification::Regular, Classification::VerticalOutlier, Classification::GoodLeverage,
                 Classification::BadLeverage}) {
    if (name == to_string(c)) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown classification '" + std::string(name) + "'");
}

void DiagnosticThresholds::validate() const {
  if (!(residual_cutoff > 0.0)) throw Error(ErrorCode::InvalidArgument, "residual cutoff must be > 0");
  if (!(severe_residual_cutoff >= residual_cutoff)) {
    throw Error(ErrorCode::InvalidArgument, "severe residual cutoff must be >= the residual cutoff");
  }
  if (!(distance_quantile > 0.0 && distance_quantile < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "distance quantile must lie in (0, 1)");
  }
}

double distance_cutoff(const DiagnosticThresholds& thresholds, std::size_t p) {
  if (p == 0) throw Error(ErrorCode::InvalidArgument, "distance cutoff needs p >= 1");
  return std::sqrt(chi2_quantile(thresholds.distance_quantile, static_cast<double>(p)));
}

DiagnosticRecord classify(double standardized_residual, double robust_distance,
                          const DiagnosticThresholds& thresholds, std::size_t p, std::string row_label) {
  thresholds.validate();
  DiagnosticRecord rec;
  rec.row_label = std::move(row_label);
  rec.standardized_residual = standardized_residual;
  rec.robust_distance = robust_distance;
  rec.distance_cutoff = distance_cutoff(thresholds, p);

  const double abs_r = std::abs(standardized_residual);
  const bool outlying = abs_r >= thresholds.residual_cutoff;
  const bool leverage = robust_distance >= rec.distance_cutoff;
  if (outlying && leverage) {
    rec.classification = Classification::BadLeverage;
  } else if (outlying) {
    rec.classification = Classification::VerticalOutlier;
  } else if (leverage) {
    rec.classification = Classification::GoodLeverage;
  }
  rec.drop_recommended = rec.classification == Classification::BadLeverage ||
                         (rec.classification == Classification::VerticalOutlier &&
                          abs_r >= thresholds.severe_residual_cutoff);
  return rec;
}

std::vector<DiagnosticRecord> classify_all(const LtsFit& lts, const McdEstimate& mcd, const Dataset& data,
                                           const DiagnosticThresholds& thresholds) {
  const std::size_t n = data.n();
  if (lts.standardized_residuals.size() != n || mcd.robust_distances.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "classify_all: LTS/MCD results do not match the dataset rows");
  }
  std::vector<DiagnosticRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(classify(lts.standardized_residuals[i], mcd.robust_distances[i], thresholds,
                           mcd.center.size(), data.row_labels()[i]));
  }
  return out;
}

PlotData outlier_map(const std::vector<DiagnosticRecord>& records, const DiagnosticThresholds& thresholds) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "outlier_map: no records");
  PlotData plot;
  plot.rd_cutoff = records.front().distance_cutoff;
  plot.sr_cutoff = thresholds.residual_cutoff;
  for (const auto& r : records) {
    plot.points.push_back(PlotPoint{r.row_label, r.robust_distance, r.standardized_residual, r.classification});
  }
  return plot;
}

std::string PlotData::to_json() const {
  nlohmann::ordered_json j;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    j["points"].push_back({{"label", p.label},
                           {"rd", json_number(p.robust_distance)},
                           {"sr", json_number(p.standardized_residual)},
                           {"class", to_string(p.classification)}});
  }
  j["rd_cutoff"] = json_number(rd_cutoff);
  j["sr_cutoff"] = json_number(sr_cutoff);
  return j.dump(2);
}

std::string PlotData::to_tsv() const {
  std::ostringstream os;
  os << "label\trd\tsr\tclass\trd_cutoff\tsr_cutoff\n";
  for (const auto& p : points) {
    os << p.label << '\t' << format_full(p.robust_distance) << '\t' << format_full(p.standardized_residual) << '\t'
       << to_string(p.classification) << '\t' << format_full(rd_cutoff) << '\t' << format_full(sr_cutoff) << '\n';
  }
  return os.str();
}

}  // namespace hibreak
