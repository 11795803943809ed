#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <random>
#include <sstream>

#include "hibreak/errors.hpp"
#include "hibreak/ols.hpp"
#include "hibreak/pipeline.hpp"

using namespace hibreak;

namespace {

std::string csv_of(const std::vector<std::string>& header, const std::vector<std::string>& labels,
                   const std::vector<Vector>& rows) {
  std::ostringstream os;
  os << "label";
  for (const auto& h : header) os << ',' << h;
  os << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << labels[i];
    for (double v : rows[i]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

Dataset parse(const std::string& text, const ModelSpec& model) {
  std::istringstream in(text);
  return parse_csv(in, model);
}

Dataset line_dataset(const Vector& x, const Vector& y) {
  std::vector<std::string> labels;
  Matrix values(x.size(), 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    labels.push_back("obs" + std::to_string(i + 1));
    values(i, 0) = y[i];
    values(i, 1) = x[i];
  }
  return Dataset(labels, {"y", "x"}, values, ModelSpec{"y", {"x"}, true});
}

AnalysisConfig line_config() {
  AnalysisConfig config;
  config.model = ModelSpec{"y", {"x"}, true};
  return config;
}

// Equispaced design with bounded deterministic noise: nothing crosses a cutoff.
Dataset quiet_dataset() {
  Vector x, y;
  for (int i = 0; i < 30; ++i) {
    x.push_back(i / 29.0);
    y.push_back(1.0 + 2.0 * x.back() + 0.05 * std::sin(7.0 * i));
  }
  return line_dataset(x, y);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Csv, WellFormed) {
  const Dataset d = parse("country,y,x\nA,1,2\n\"B, north\",3,4.5\nC,-1e2,0\n", ModelSpec{"y", {"x"}, true});
  EXPECT_EQ(d.n(), 3u);
  EXPECT_EQ(d.row_labels()[1], "B, north");
  EXPECT_EQ(d.values()(2, 0), -100.0);
  EXPECT_EQ(d.column_names(), (std::vector<std::string>{"y", "x"}));
}

TEST(Csv, BomAndCrlf) {
  const Dataset d = parse("\xEF\xBB\xBFid,y,x\r\na,1,2\r\nb,2,3\r\nc,4,1\r\n", ModelSpec{"y", {"x"}, true});
  EXPECT_EQ(d.n(), 3u);
  EXPECT_EQ(d.row_labels()[0], "a");
}

TEST(Csv, NonNumericCell) {
  const std::string text = "country,GDP,LFG,GAP\nA,1,2,3\nB,1,2,abc\nC,1,2,3\nD,2,3,4\n";
  try {
    parse(text, ModelSpec{"GDP", {"LFG", "GAP"}, true});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "GAP");
  }
}

TEST(Csv, RejectsNonFiniteAndRaggedRows) {
  const ModelSpec m{"y", {"x"}, true};
  EXPECT_EQ(code_of([&] { parse("l,y,x\na,1,nan\nb,2,3\nc,3,3\n", m); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse("l,y,x\na,1,inf\nb,2,3\nc,3,3\n", m); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse("l,y,x\na,1\nb,2,3\nc,3,3\n", m); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { parse("l,y,x\na,1,\nb,2,3\nc,3,3\n", m); }), ErrorCode::ParseError);
}

TEST(Csv, MissingColumnDuplicateLabelMissingFile) {
  const std::string text = "l,y,x\na,1,2\nb,2,3\nc,3,5\n";
  EXPECT_EQ(code_of([&] { parse(text, ModelSpec{"y", {"z"}, true}); }), ErrorCode::MissingColumn);
  EXPECT_EQ(code_of([&] { parse(text, ModelSpec{"w", {"x"}, true}); }), ErrorCode::MissingColumn);
  EXPECT_EQ(code_of([&] { parse("l,y,x\na,1,2\na,2,3\nc,3,5\n", ModelSpec{"y", {"x"}, true}); }),
            ErrorCode::DuplicateLabel);
  EXPECT_EQ(code_of([] { load_csv("/nonexistent/dir/data.csv", ModelSpec{"y", {"x"}, true}); }),
            ErrorCode::FileNotFound);
}

TEST(Csv, SixtyOneRowsFourPredictors) {
  std::mt19937_64 rng(81);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::string> labels;
  std::vector<Vector> rows;
  for (int i = 0; i < 61; ++i) {
    labels.push_back("country" + std::to_string(i));
    rows.push_back({g(rng), g(rng), g(rng), g(rng), g(rng)});
  }
  const auto path = std::filesystem::temp_directory_path() / "hibreak_growth_shape.csv";
  std::ofstream(path) << csv_of({"GDP", "LFG", "GAP", "EQP", "NEQ"}, labels, rows);
  const Dataset d = load_csv(path, ModelSpec{"GDP", {"LFG", "GAP", "EQP", "NEQ"}, true});
  std::filesystem::remove(path);
  EXPECT_EQ(d.n(), 61u);
  EXPECT_EQ(d.n_coefficients(), 5u);
  EXPECT_EQ(d.term_names(), (std::vector<std::string>{"Const", "LFG", "GAP", "EQP", "NEQ"}));
  EXPECT_EQ(d.design().cols(), 5u);
}

TEST(RunAnalysis, NoOutlierIdentity) {
  const Dataset d = quiet_dataset();
  const AnalysisReport r = run_analysis(d, line_config());
  for (const auto& rec : r.diagnostics) EXPECT_EQ(rec.classification, Classification::Regular) << rec.row_label;
  EXPECT_TRUE(r.dropped.empty());
  EXPECT_EQ(r.robust_fit, r.ols_fit);
  for (const auto& c : r.comparison) {
    EXPECT_EQ(c.ols_coeff, c.robust_coeff);
    EXPECT_EQ(c.ols_t, c.robust_t);
  }
  const std::string md = render_report(r, OutputFormat::Markdown);
  EXPECT_NE(md.find("## Dropped observations\n\nnone\n"), std::string::npos);
}

TEST(RunAnalysis, PlantedBadLeverage) {
  std::mt19937_64 rng(82);
  std::uniform_real_distribution<double> ux(0.0, 5.0);
  std::normal_distribution<double> noise(0.0, 0.3);
  Vector x, y;
  for (int i = 0; i < 36; ++i) {
    x.push_back(ux(rng));
    y.push_back(2.0 + 3.0 * x.back() + noise(rng));
  }
  for (int i = 0; i < 4; ++i) {
    x.push_back(10.0);
    y.push_back(-20.0);
  }
  const AnalysisReport r = run_analysis(line_dataset(x, y), line_config());
  std::set<std::string> dropped;
  for (const auto& d : r.dropped) dropped.insert(d.label);
  for (const char* label : {"obs37", "obs38", "obs39", "obs40"}) EXPECT_TRUE(dropped.count(label)) << label;
  for (const auto& rec : r.diagnostics) {
    if (rec.row_label >= "obs37" && rec.row_label.size() == 5 && rec.row_label <= "obs40") {
      EXPECT_EQ(rec.classification, Classification::BadLeverage);
    }
  }
  EXPECT_GE(r.robust_fit.coefficients[1], 2.8);
  EXPECT_LE(r.robust_fit.coefficients[1], 3.2);
  EXPECT_LT(r.ols_fit.coefficients[1], 2.0);
  EXPECT_EQ(r.robust_fit.n_used, 40u - r.dropped.size());
}

TEST(RunAnalysis, SevereDroppedMildRetained) {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> noise(0.0, 1.0);
  Vector x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i / 4.0);
    y.push_back(1.0 + 0.5 * x.back() + noise(rng));
  }
  y[20] -= 8.0;  // severe, central x
  y[14] += 3.0;  // mild, central x
  const AnalysisReport r = run_analysis(line_dataset(x, y), line_config());
  const auto& severe = r.diagnostics[20];
  const auto& mild = r.diagnostics[14];
  EXPECT_EQ(severe.classification, Classification::VerticalOutlier);
  EXPECT_LE(severe.standardized_residual, -4.0);
  EXPECT_TRUE(severe.drop_recommended);
  EXPECT_EQ(mild.classification, Classification::VerticalOutlier);
  EXPECT_GE(std::abs(mild.standardized_residual), 2.5);
  EXPECT_LT(std::abs(mild.standardized_residual), 4.0);
  EXPECT_FALSE(mild.drop_recommended);

  std::set<std::string> dropped;
  for (const auto& d : r.dropped) dropped.insert(d.label);
  EXPECT_TRUE(dropped.count("obs21"));
  EXPECT_FALSE(dropped.count("obs15"));
}

TEST(RunAnalysis, DropSoundnessAndOrdering) {
  std::mt19937_64 rng(84);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::string> labels;
  Matrix values(60, 4);
  for (std::size_t i = 0; i < 60; ++i) {
    labels.push_back("c" + std::to_string(i));
    const double a = g(rng), b = g(rng), c = g(rng);
    values(i, 0) = 0.5 + a - 2.0 * b + 0.3 * c + 0.2 * g(rng);
    values(i, 1) = a;
    values(i, 2) = b;
    values(i, 3) = c;
    if (i % 9 == 0) values(i, 0) += 15.0;
    if (i % 13 == 0) values(i, 1) += 12.0;
  }
  const Dataset d(labels, {"y", "a", "b", "c"}, values, ModelSpec{"y", {"c", "a", "b"}, true});
  AnalysisConfig config;
  config.model = d.model();
  const AnalysisReport r = run_analysis(d, config);
  ASSERT_EQ(r.comparison.size(), 4u);
  EXPECT_EQ(r.comparison[0].term, "Const");
  EXPECT_EQ(r.comparison[1].term, "c");
  EXPECT_EQ(r.comparison[3].term, "b");
  EXPECT_FALSE(r.dropped.empty());
  for (const auto& drop : r.dropped) {
    const auto it = std::find_if(r.diagnostics.begin(), r.diagnostics.end(),
                                 [&](const DiagnosticRecord& rec) { return rec.row_label == drop.label; });
    ASSERT_NE(it, r.diagnostics.end());
    EXPECT_TRUE(it->drop_recommended);
  }
  std::size_t recommended = 0;
  for (const auto& rec : r.diagnostics) recommended += rec.drop_recommended ? 1 : 0;
  EXPECT_EQ(recommended, r.dropped.size());
  EXPECT_EQ(r.robust_fit.n_used, d.n() - r.dropped.size());
  EXPECT_EQ(r.config_echo.leverage_dimension, 3u);
}

TEST(RunAnalysis, ConfigEchoCarriesEverySetting) {
  AnalysisConfig config = line_config();
  config.lts.alpha = 0.2;
  config.lts.seed = 99;
  config.mcd.seed = 7;
  config.thresholds.residual_cutoff = 3.0;
  const AnalysisReport r = run_analysis(quiet_dataset(), config);
  const auto& e = r.config_echo;
  EXPECT_EQ(e.lts_alpha, 0.2);
  EXPECT_EQ(e.lts_h, 24u);
  EXPECT_EQ(e.lts_seed, 99u);
  EXPECT_EQ(e.mcd_seed, 7u);
  EXPECT_EQ(e.mcd_h, 22u);
  EXPECT_EQ(e.residual_cutoff, 3.0);
  EXPECT_EQ(e.severe_residual_cutoff, 4.0);
  EXPECT_EQ(e.distance_quantile, 0.975);
  EXPECT_GT(e.distance_cutoff, 0.0);
  EXPECT_GT(e.lts_consistency_factor, 1.0);
  EXPECT_GT(e.mcd_consistency_factor, 1.0);
  EXPECT_EQ(e.mcd_reweighting, "off");
  const std::string md = render_report(r, OutputFormat::Markdown);
  for (const char* key : {"- LTS alpha: 0.2000\n", "- LTS h: 24\n", "- LTS seed: 99\n", "- LTS consistency factor: ",
                          "- MCD h: 22\n", "- MCD seed: 7\n", "- MCD consistency factor: ", "- MCD reweighting: off",
                          "- residual cutoff: 3.0000\n", "- severe residual cutoff: 4.0000\n", "- distance quantile: 0.9750\n",
                          "- distance cutoff: ", "- drop policy: "}) {
    EXPECT_NE(md.find(key), std::string::npos) << key;
  }
}

TEST(RunAnalysis, StageErrorsAreTagged) {
  Matrix values{{1, 1, 2}, {2, 2, 4}, {3, 3, 6}, {5, 4, 8}, {4, 5, 10}};
  const Dataset d({"a", "b", "c", "d", "e"}, {"y", "u", "v"}, values, ModelSpec{"y", {"u", "v"}, true});
  AnalysisConfig config;
  config.model = d.model();
  try {
    run_analysis(d, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    EXPECT_EQ(std::string(e.what()).rfind("ols:", 0), 0u) << e.what();
  }
}

TEST(Render, TValueAtPrintedPrecision) {
  AnalysisReport r = run_analysis(quiet_dataset(), line_config());
  ComparisonRow& row = r.comparison[1];
  row.term = "Growth";
  row.ols_coeff = 4.78;
  row.ols_se = 1.37;
  row.ols_t = t_statistic(4.78, 1.37);
  const std::string md = render_report(r, OutputFormat::Markdown);
  const auto start = md.find("| Growth | ");
  ASSERT_NE(start, std::string::npos);
  std::istringstream cells(md.substr(start, md.find('\n', start) - start));
  std::string cell;
  std::vector<std::string> parts;
  while (std::getline(cells, cell, '|')) parts.push_back(cell);
  // parts: "", " Growth ", coeff, se, t, ...
  const double t = std::stod(parts[4]);
  EXPECT_EQ(std::round(t * 100.0) / 100.0, 3.49);
  EXPECT_EQ(parts[4], " +3.4891 ");
}

TEST(Render, JsonRoundTripPreservesMarkdown) {
  std::mt19937_64 rng(85);
  std::normal_distribution<double> noise(0.0, 1.0);
  Vector x, y;
  for (int i = 0; i < 25; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 0.7 * i + noise(rng));
  }
  y[3] += 25.0;
  x[24] = 80.0;
  AnalysisConfig config = line_config();
  config.run_oracle = false;
  const AnalysisReport r = run_analysis(line_dataset(x, y), config);
  const std::string json = render_report(r, OutputFormat::Json);
  const AnalysisReport back = report_from_json(nlohmann::ordered_json::parse(json));
  EXPECT_EQ(back, r);
  EXPECT_EQ(render_report(back, OutputFormat::Markdown), render_report(r, OutputFormat::Markdown));
  EXPECT_EQ(render_report(back, OutputFormat::Json), json);
  EXPECT_EQ(render_report(back, OutputFormat::Tsv), render_report(r, OutputFormat::Tsv));
}

TEST(Render, ExactFitSentinelsSurviveJson) {
  Vector x{0, 1, 2, 3, 4, 5, 6, 7}, y{1, 3, 5, 7, 9, 11, 13, 40};
  const AnalysisReport r = run_analysis(line_dataset(x, y), line_config());
  EXPECT_TRUE(r.lts.zero_scale);
  EXPECT_TRUE(std::isinf(r.diagnostics[7].standardized_residual));
  const std::string json = render_report(r, OutputFormat::Json);
  EXPECT_NE(json.find("\"inf\""), std::string::npos);
  EXPECT_EQ(report_from_json(nlohmann::ordered_json::parse(json)), r);
}

TEST(RunAnalysis, DeterministicJson) {
  std::mt19937_64 rng(86);
  std::normal_distribution<double> noise(0.0, 1.0);
  Vector x, y;
  for (int i = 0; i < 120; ++i) {
    x.push_back(noise(rng));
    y.push_back(1.0 + x.back() + noise(rng));
  }
  for (int i = 0; i < 10; ++i) y[i * 7] += 12.0;
  const Dataset d = line_dataset(x, y);
  const std::string a = render_report(run_analysis(d, line_config()), OutputFormat::Json);
  const std::string b = render_report(run_analysis(d, line_config()), OutputFormat::Json);
  EXPECT_EQ(a, b);
}

TEST(RunAnalysis, OracleCheckOnSmallInput) {
  Vector x{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, y{0.1, 1.2, 1.9, 3.2, 3.9, 5.1, 6.0, 7.2, 30, 9.1};
  AnalysisConfig config = line_config();
  config.run_oracle = true;
  const AnalysisReport r = run_analysis(line_dataset(x, y), config);
  ASSERT_TRUE(r.oracle.has_value());
  EXPECT_GE(r.oracle->lts_search_objective, r.oracle->lts_exact_objective);
  EXPECT_NEAR(r.oracle->lts_search_objective, r.oracle->lts_exact_objective, 1e-9);
  EXPECT_GE(r.oracle->mcd_search_determinant, r.oracle->mcd_exact_determinant);
  EXPECT_TRUE(r.config_echo.oracle);
}

TEST(OutputFormatNames, Parse) {
  EXPECT_EQ(parse_output_format("json"), OutputFormat::Json);
  EXPECT_EQ(parse_output_format("markdown"), OutputFormat::Markdown);
  EXPECT_EQ(parse_output_format("tsv"), OutputFormat::Tsv);
  EXPECT_THROW(parse_output_format("xml"), Error);
}
