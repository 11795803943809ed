#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct Outcome {
  int exit_code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(HIBREAK_CLI) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kSample = std::string(HIBREAK_DATA_DIR) + "/sample.csv";
const std::string kModel = " --response yield --predictors dose,temp";

}  // namespace

TEST(Cli, MarkdownReport) {
  const Outcome r = run("analyze " + kSample + kModel);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("| Var. | OLS Coeff."), std::string::npos);
  EXPECT_NE(r.out.find("- site06 (BadLeverage"), std::string::npos);
}

TEST(Cli, JsonIsDeterministic) {
  const Outcome a = run("analyze " + kSample + kModel + " --format json --seed 11 --starts 200");
  const Outcome b = run("analyze " + kSample + kModel + " --format json --seed 11 --starts 200");
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_TRUE(j.is_object());
}

TEST(Cli, TsvAndPlotData) {
  const auto plot = std::filesystem::temp_directory_path() / "hibreak_cli_plot.json";
  const Outcome r = run("analyze " + kSample + kModel + " --format tsv --plot-data " + plot.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("term\tols_coeff", 0), 0u);
  std::ifstream in(plot);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["points"].size(), 40u);
  EXPECT_TRUE(j.contains("rd_cutoff"));
  EXPECT_DOUBLE_EQ(j["sr_cutoff"].get<double>(), 2.5);
  std::filesystem::remove(plot);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("analyze /nonexistent.csv" + kModel).exit_code, 2);
  EXPECT_EQ(run("analyze " + kSample + " --response yield --predictors dose,nope").exit_code, 2);
  const auto bad = std::filesystem::temp_directory_path() / "hibreak_cli_bad.csv";
  std::ofstream(bad) << "site,yield,dose,temp\na,1,2,3\nb,1,x,3\nc,2,3,4\nd,5,1,1\n";
  EXPECT_EQ(run("analyze " + bad.string() + kModel).exit_code, 2);
  std::filesystem::remove(bad);
}

TEST(Cli, NumericalFailureExitsThree) {
  const auto path = std::filesystem::temp_directory_path() / "hibreak_cli_collinear.csv";
  std::ofstream(path) << "id,y,a,b\nr1,1,1,2\nr2,2,2,4\nr3,2,3,6\nr4,5,4,8\nr5,4,5,10\nr6,7,6,12\n";
  EXPECT_EQ(run("analyze " + path.string() + " --response y --predictors a,b").exit_code, 3);
  std::filesystem::remove(path);
}

TEST(Cli, BadFlagsExitFour) {
  EXPECT_EQ(run("analyze " + kSample + kModel + " --alpha 0.7").exit_code, 4);
  EXPECT_EQ(run("analyze " + kSample + kModel + " --format xml").exit_code, 4);
  EXPECT_EQ(run("analyze " + kSample + kModel + " --bogus").exit_code, 4);
  EXPECT_EQ(run("analyze " + kSample + kModel + " --severe-cutoff 1.0").exit_code, 4);
  EXPECT_EQ(run("analyze " + kSample).exit_code, 4);
}
