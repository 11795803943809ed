#include <cmath>
#include <cstdio>
#include <sstream>

#include "hibreak/errors.hpp"
#include "hibreak/json_io.hpp"
#include "hibreak/pipeline.hpp"

namespace hibreak {

using json = nlohmann::ordered_json;

namespace {

json fit_to_json(const RegressionFit& f) {
  return json{{"terms", f.terms},
              {"has_intercept", f.has_intercept},
              {"coefficients", json_vector(f.coefficients)},
              {"standard_errors", json_vector(f.standard_errors)},
              {"t_values", json_vector(f.t_values)},
              {"p_values", json_vector(f.p_values)},
              {"residuals", json_vector(f.residuals)},
              {"sigma", json_number(f.sigma)},
              {"r_squared", json_number(f.r_squared)},
              {"f_value", json_number(f.f_value)},
              {"n_used", f.n_used},
              {"dropped_labels", f.dropped_labels}};
}

RegressionFit fit_from_json(const json& j) {
  RegressionFit f;
  f.terms = j.at("terms").get<std::vector<std::string>>();
  f.has_intercept = j.at("has_intercept").get<bool>();
  f.coefficients = vector_from_json(j.at("coefficients"));
  f.standard_errors = vector_from_json(j.at("standard_errors"));
  f.t_values = vector_from_json(j.at("t_values"));
  f.p_values = vector_from_json(j.at("p_values"));
  f.residuals = vector_from_json(j.at("residuals"));
  f.sigma = number_from_json(j.at("sigma"));
  f.r_squared = number_from_json(j.at("r_squared"));
  f.f_value = number_from_json(j.at("f_value"));
  f.n_used = j.at("n_used").get<std::size_t>();
  f.dropped_labels = j.at("dropped_labels").get<std::vector<std::string>>();
  return f;
}

json echo_to_json(const ConfigEcho& e) {
  return json{{"response", e.model.response},
              {"predictors", e.model.predictors},
              {"intercept", e.model.intercept},
              {"n_rows", e.n_rows},
              {"leverage_dimension", e.leverage_dimension},
              {"lts_alpha", json_number(e.lts_alpha)},
              {"lts_h", e.lts_h},
              {"lts_n_starts", e.lts_n_starts},
              {"lts_n_best_kept", e.lts_n_best_kept},
              {"lts_max_csteps", e.lts_max_csteps},
              {"lts_seed", e.lts_seed},
              {"lts_start_mode", e.lts_start_mode},
              {"lts_consistency_factor", json_number(e.lts_consistency_factor)},
              {"mcd_h_fraction", json_number(e.mcd_h_fraction)},
              {"mcd_h", e.mcd_h},
              {"mcd_n_starts", e.mcd_n_starts},
              {"mcd_n_best_kept", e.mcd_n_best_kept},
              {"mcd_max_csteps", e.mcd_max_csteps},
              {"mcd_seed", e.mcd_seed},
              {"mcd_start_mode", e.mcd_start_mode},
              {"mcd_consistency_factor", json_number(e.mcd_consistency_factor)},
              {"mcd_reweighting", e.mcd_reweighting},
              {"residual_cutoff", json_number(e.residual_cutoff)},
              {"severe_residual_cutoff", json_number(e.severe_residual_cutoff)},
              {"distance_quantile", json_number(e.distance_quantile)},
              {"distance_cutoff", json_number(e.distance_cutoff)},
              {"drop_policy", e.drop_policy},
              {"output_format", e.output_format},
              {"oracle", e.oracle}};
}

ConfigEcho echo_from_json(const json& j) {
  ConfigEcho e;
  e.model.response = j.at("response").get<std::string>();
  e.model.predictors = j.at("predictors").get<std::vector<std::string>>();
  e.model.intercept = j.at("intercept").get<bool>();
  e.n_rows = j.at("n_rows").get<std::size_t>();
  e.leverage_dimension = j.at("leverage_dimension").get<std::size_t>();
  e.lts_alpha = number_from_json(j.at("lts_alpha"));
  e.lts_h = j.at("lts_h").get<std::size_t>();
  e.lts_n_starts = j.at("lts_n_starts").get<std::size_t>();
  e.lts_n_best_kept = j.at("lts_n_best_kept").get<std::size_t>();
  e.lts_max_csteps = j.at("lts_max_csteps").get<std::size_t>();
  e.lts_seed = j.at("lts_seed").get<std::uint64_t>();
  e.lts_start_mode = j.at("lts_start_mode").get<std::string>();
  e.lts_consistency_factor = number_from_json(j.at("lts_consistency_factor"));
  e.mcd_h_fraction = number_from_json(j.at("mcd_h_fraction"));
  e.mcd_h = j.at("mcd_h").get<std::size_t>();
  e.mcd_n_starts = j.at("mcd_n_starts").get<std::size_t>();
  e.mcd_n_best_kept = j.at("mcd_n_best_kept").get<std::size_t>();
  e.mcd_max_csteps = j.at("mcd_max_csteps").get<std::size_t>();
  e.mcd_seed = j.at("mcd_seed").get<std::uint64_t>();
  e.mcd_start_mode = j.at("mcd_start_mode").get<std::string>();
  e.mcd_consistency_factor = number_from_json(j.at("mcd_consistency_factor"));
  e.mcd_reweighting = j.at("mcd_reweighting").get<std::string>();
  e.residual_cutoff = number_from_json(j.at("residual_cutoff"));
  e.severe_residual_cutoff = number_from_json(j.at("severe_residual_cutoff"));
  e.distance_quantile = number_from_json(j.at("distance_quantile"));
  e.distance_cutoff = number_from_json(j.at("distance_cutoff"));
  e.drop_policy = j.at("drop_policy").get<std::string>();
  e.output_format = j.at("output_format").get<std::string>();
  e.oracle = j.at("oracle").get<bool>();
  return e;
}

// Explicit sign, four decimals.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.4f", v);
  return buf;
}

std::string plain(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<std::pair<std::string, std::string>> echo_entries(const ConfigEcho& e) {
  std::string predictors;
  for (std::size_t i = 0; i < e.model.predictors.size(); ++i) {
    predictors += (i ? "," : "") + e.model.predictors[i];
  }
  return {
      {"response", e.model.response},
      {"predictors", predictors},
      {"intercept", e.model.intercept ? "yes" : "no"},
      {"rows", std::to_string(e.n_rows)},
      {"leverage dimension p", std::to_string(e.leverage_dimension)},
      {"LTS alpha", plain(e.lts_alpha)},
      {"LTS h", std::to_string(e.lts_h)},
      {"LTS starts", std::to_string(e.lts_n_starts)},
      {"LTS best kept", std::to_string(e.lts_n_best_kept)},
      {"LTS max C-steps", std::to_string(e.lts_max_csteps)},
      {"LTS seed", std::to_string(e.lts_seed)},
      {"LTS start mode", e.lts_start_mode},
      {"LTS consistency factor", plain(e.lts_consistency_factor)},
      {"MCD h fraction", plain(e.mcd_h_fraction)},
      {"MCD h", std::to_string(e.mcd_h)},
      {"MCD starts", std::to_string(e.mcd_n_starts)},
      {"MCD best kept", std::to_string(e.mcd_n_best_kept)},
      {"MCD max C-steps", std::to_string(e.mcd_max_csteps)},
      {"MCD seed", std::to_string(e.mcd_seed)},
      {"MCD start mode", e.mcd_start_mode},
      {"MCD consistency factor", plain(e.mcd_consistency_factor)},
      {"MCD reweighting", e.mcd_reweighting},
      {"residual cutoff", plain(e.residual_cutoff)},
      {"severe residual cutoff", plain(e.severe_residual_cutoff)},
      {"distance quantile", plain(e.distance_quantile)},
      {"distance cutoff", plain(e.distance_cutoff)},
      {"drop policy", e.drop_policy},
      {"output format", e.output_format},
      {"oracle", e.oracle ? "yes" : "no"},
  };
}

std::string render_markdown(const AnalysisReport& r) {
  std::ostringstream os;
  const auto& e = r.config_echo;
  os << "# Robust regression analysis: " << e.model.response << "\n\n";
  os << "Model: " << e.model.response << " ~ ";
  for (std::size_t j = 0; j < r.ols_fit.terms.size(); ++j) os << (j ? " + " : "") << r.ols_fit.terms[j];
  os << " (n = " << e.n_rows << ")\n\n";

  os << "| Var. | OLS Coeff. | OLS S.E. | OLS t-value | OLS P-value "
        "| ROBUST Coeff. | ROBUST S.E. | ROBUST t-value | ROBUST P-value |\n";
  os << "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& c : r.comparison) {
    os << "| " << c.term << " | " << num(c.ols_coeff) << " | " << num(c.ols_se) << " | " << num(c.ols_t) << " | "
       << num(c.ols_p) << " | " << num(c.robust_coeff) << " | " << num(c.robust_se) << " | " << num(c.robust_t)
       << " | " << num(c.robust_p) << " |\n";
  }
  os << "\n| Statistic | OLS | ROBUST |\n|---|---:|---:|\n";
  os << "| R² | " << num(r.ols_fit.r_squared) << " | " << num(r.robust_fit.r_squared) << " |\n";
  os << "| F-value | " << num(r.ols_fit.f_value) << " | " << num(r.robust_fit.f_value) << " |\n";
  os << "| S.E. of regression | " << num(r.ols_fit.sigma) << " | " << num(r.robust_fit.sigma) << " |\n";
  os << "| Observations | " << r.ols_fit.n_used << " | " << r.robust_fit.n_used << " |\n";

  os << "\n## Dropped observations\n\n";
  if (r.dropped.empty()) {
    os << "none\n";
  } else {
    for (const auto& d : r.dropped) os << "- " << d.label << " (" << d.reason << ")\n";
  }

  os << "\n## Flagged observations\n\n";
  bool any = false;
  for (const auto& d : r.diagnostics) {
    if (d.classification == Classification::Regular) continue;
    if (!any) {
      os << "| Label | Std. LTS residual | Robust distance | Class | Dropped |\n|---|---:|---:|---|---|\n";
      any = true;
    }
    os << "| " << d.row_label << " | " << num(d.standardized_residual) << " | " << num(d.robust_distance) << " | "
       << to_string(d.classification) << " | " << (d.drop_recommended ? "yes" : "no") << " |\n";
  }
  if (!any) os << "none\n";

  os << "\n## Estimators\n\n";
  os << "- LTS objective: " << num(r.lts.objective) << ", robust scale: " << num(r.lts.robust_scale)
     << (r.lts.zero_scale ? " (exact fit)" : "") << ", converged: " << (r.lts.converged ? "yes" : "no")
     << ", C-steps: " << r.lts.n_csteps_total << "\n";
  os << "- MCD raw determinant: " << num(r.mcd.raw_determinant) << (r.mcd.exact_fit ? " (exact fit)" : "")
     << ", converged: " << (r.mcd.converged ? "yes" : "no") << ", C-steps: " << r.mcd.n_csteps_total << "\n";
  if (r.oracle) {
    const auto& o = *r.oracle;
    os << "- Exhaustive LTS objective: " << num(o.lts_exact_objective) << " over " << o.lts_subsets
       << " subsets (search: " << num(o.lts_search_objective) << ")\n";
    os << "- Exhaustive MCD determinant: " << num(o.mcd_exact_determinant) << " over " << o.mcd_subsets
       << " subsets (search: " << num(o.mcd_search_determinant) << ")\n";
  }

  os << "\n## Settings\n\n";
  for (const auto& [k, v] : echo_entries(e)) os << "- " << k << ": " << v << "\n";
  return os.str();
}

std::string render_tsv(const AnalysisReport& r) {
  std::ostringstream os;
  os << "term\tols_coeff\tols_se\tols_t\tols_p\trobust_coeff\trobust_se\trobust_t\trobust_p\n";
  for (const auto& c : r.comparison) {
    os << c.term << '\t' << num(c.ols_coeff) << '\t' << num(c.ols_se) << '\t' << num(c.ols_t) << '\t'
       << num(c.ols_p) << '\t' << num(c.robust_coeff) << '\t' << num(c.robust_se) << '\t' << num(c.robust_t)
       << '\t' << num(c.robust_p) << '\n';
  }
  os << "\nstatistic\tols\trobust\n";
  os << "r_squared\t" << num(r.ols_fit.r_squared) << '\t' << num(r.robust_fit.r_squared) << '\n';
  os << "f_value\t" << num(r.ols_fit.f_value) << '\t' << num(r.robust_fit.f_value) << '\n';
  os << "sigma\t" << num(r.ols_fit.sigma) << '\t' << num(r.robust_fit.sigma) << '\n';
  os << "n_used\t" << r.ols_fit.n_used << '\t' << r.robust_fit.n_used << '\n';
  os << "\nlabel\tstandardized_residual\trobust_distance\tclass\tdropped\n";
  for (const auto& d : r.diagnostics) {
    os << d.row_label << '\t' << num(d.standardized_residual) << '\t' << num(d.robust_distance) << '\t'
       << to_string(d.classification) << '\t' << (d.drop_recommended ? "yes" : "no") << '\n';
  }
  os << "\nsetting\tvalue\n";
  for (const auto& [k, v] : echo_entries(r.config_echo)) os << k << '\t' << v << '\n';
  return os.str();
}

}  // namespace

json report_to_json(const AnalysisReport& r) {
  json j;
  j["ols_fit"] = fit_to_json(r.ols_fit);
  j["robust_fit"] = fit_to_json(r.robust_fit);
  j["comparison"] = json::array();
  for (const auto& c : r.comparison) {
    j["comparison"].push_back({{"term", c.term},
                               {"ols_coeff", json_number(c.ols_coeff)},
                               {"ols_se", json_number(c.ols_se)},
                               {"ols_t", json_number(c.ols_t)},
                               {"ols_p", json_number(c.ols_p)},
                               {"robust_coeff", json_number(c.robust_coeff)},
                               {"robust_se", json_number(c.robust_se)},
                               {"robust_t", json_number(c.robust_t)},
                               {"robust_p", json_number(c.robust_p)}});
  }
  j["diagnostics"] = json::array();
  for (const auto& d : r.diagnostics) {
    j["diagnostics"].push_back({{"label", d.row_label},
                                {"standardized_residual", json_number(d.standardized_residual)},
                                {"robust_distance", json_number(d.robust_distance)},
                                {"distance_cutoff", json_number(d.distance_cutoff)},
                                {"class", to_string(d.classification)},
                                {"drop_recommended", d.drop_recommended}});
  }
  j["dropped"] = json::array();
  for (const auto& d : r.dropped) j["dropped"].push_back({{"label", d.label}, {"reason", d.reason}});
  j["lts"] = {{"coefficients", json_vector(r.lts.coefficients)},
              {"objective", json_number(r.lts.objective)},
              {"robust_scale", json_number(r.lts.robust_scale)},
              {"zero_scale", r.lts.zero_scale},
              {"converged", r.lts.converged},
              {"n_csteps_total", r.lts.n_csteps_total}};
  j["mcd"] = {{"center", json_vector(r.mcd.center)},
              {"raw_determinant", json_number(r.mcd.raw_determinant)},
              {"exact_fit", r.mcd.exact_fit},
              {"converged", r.mcd.converged},
              {"n_csteps_total", r.mcd.n_csteps_total}};
  if (r.oracle) {
    const auto& o = *r.oracle;
    j["oracle"] = {{"lts_search_objective", json_number(o.lts_search_objective)},
                   {"lts_exact_objective", json_number(o.lts_exact_objective)},
                   {"lts_subsets", o.lts_subsets},
                   {"mcd_search_determinant", json_number(o.mcd_search_determinant)},
                   {"mcd_exact_determinant", json_number(o.mcd_exact_determinant)},
                   {"mcd_subsets", o.mcd_subsets}};
  }
  j["config"] = echo_to_json(r.config_echo);
  return j;
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  try {
    r.ols_fit = fit_from_json(j.at("ols_fit"));
    r.robust_fit = fit_from_json(j.at("robust_fit"));
    for (const auto& c : j.at("comparison")) {
      r.comparison.push_back(ComparisonRow{
          c.at("term").get<std::string>(), number_from_json(c.at("ols_coeff")), number_from_json(c.at("ols_se")),
          number_from_json(c.at("ols_t")), number_from_json(c.at("ols_p")), number_from_json(c.at("robust_coeff")),
          number_from_json(c.at("robust_se")), number_from_json(c.at("robust_t")),
          number_from_json(c.at("robust_p"))});
    }
    for (const auto& d : j.at("diagnostics")) {
      DiagnosticRecord rec;
      rec.row_label = d.at("label").get<std::string>();
      rec.standardized_residual = number_from_json(d.at("standardized_residual"));
      rec.robust_distance = number_from_json(d.at("robust_distance"));
      rec.distance_cutoff = number_from_json(d.at("distance_cutoff"));
      rec.classification = classification_from_string(d.at("class").get<std::string>());
      rec.drop_recommended = d.at("drop_recommended").get<bool>();
      r.diagnostics.push_back(std::move(rec));
    }
    for (const auto& d : j.at("dropped")) {
      r.dropped.push_back(DroppedRow{d.at("label").get<std::string>(), d.at("reason").get<std::string>()});
    }
    const auto& l = j.at("lts");
    r.lts = LtsSummary{vector_from_json(l.at("coefficients")), number_from_json(l.at("objective")),
                       number_from_json(l.at("robust_scale")), l.at("zero_scale").get<bool>(),
                       l.at("converged").get<bool>(), l.at("n_csteps_total").get<std::size_t>()};
    const auto& m = j.at("mcd");
    r.mcd = McdSummary{vector_from_json(m.at("center")), number_from_json(m.at("raw_determinant")),
                       m.at("exact_fit").get<bool>(), m.at("converged").get<bool>(),
                       m.at("n_csteps_total").get<std::size_t>()};
    if (j.contains("oracle")) {
      const auto& o = j.at("oracle");
      r.oracle = OracleCheck{number_from_json(o.at("lts_search_objective")),
                             number_from_json(o.at("lts_exact_objective")), o.at("lts_subsets").get<std::uint64_t>(),
                             number_from_json(o.at("mcd_search_determinant")),
                             number_from_json(o.at("mcd_exact_determinant")), o.at("mcd_subsets").get<std::uint64_t>()};
    }
    r.config_echo = echo_from_json(j.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

std::string render_report(const AnalysisReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Json: return report_to_json(report).dump(2) + "\n";
    case OutputFormat::Markdown: return render_markdown(report);
    case OutputFormat::Tsv: return render_tsv(report);
  }
  return {};
}

}  // namespace hibreak
