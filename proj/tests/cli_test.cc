// Copyright 2026 The Privacy at Risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "par/cli.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "par/sensitivity_estimation.h"
#include "testing/status_matchers.h"

namespace par {
namespace {

using ::testing::HasSubstr;
using Json = nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

Json RunJson(const std::vector<std::string>& args) {
  const Outcome r = Invoke(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return Json::parse(r.out);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("PAR_SEED"); }
};

TEST_F(CliTest, RiskCase1SolvesNoiseLevel) {
  const Json j = RunJson(
      {"risk", "--case", "1", "--eps", "0.4", "--gamma", "0.6", "--solve",
       "eps0"});
  EXPECT_EQ(j["case"], 1);
  EXPECT_NEAR(j["eps0"].get<double>(), 0.8, 0.005);
}

TEST_F(CliTest, RiskCase1FullConfidenceGivesNoiseLevel) {
  const Json j =
      RunJson({"risk", "--case", "1", "--eps0", "1", "--gamma", "1", "--k", "1"});
  EXPECT_NEAR(j["eps"].get<double>(), 1.0, 1e-9);
}

TEST_F(CliTest, RiskCase1ComputesConfidence) {
  const Json j = RunJson({"risk", "--eps0", "0.5", "--eps", "0.27"});
  // (1 - e^-0.27) / (1 - e^-0.5), six significant digits.
  EXPECT_DOUBLE_EQ(j["gamma"].get<double>(), 0.60137);
}

TEST_F(CliTest, RiskCase2Bound) {
  const Json j = RunJson(
      {"risk", "--case", "2", "--gamma2", "0.5", "--rho", "0.01", "--n", "10000"});
  EXPECT_DOUBLE_EQ(j["gamma"].get<double>(), 0.364665);
  EXPECT_EQ(j["n"], 10000);
}

TEST_F(CliTest, RiskCase3ForwardAndInverseAgree) {
  const Json forward =
      RunJson({"risk", "--case", "3", "--eps", "0.3", "--eps0", "0.8", "--eta",
               "1.1", "--gamma2", "0.9", "--rho", "0.01", "--n", "20000"});
  const double gamma = forward["gamma"].get<double>();
  EXPECT_GT(gamma, 0.0);
  EXPECT_LT(gamma, 1.0);
  const Json inverse = RunJson(
      {"risk", "--case", "3", "--eps", "0.3", "--gamma", std::to_string(gamma),
       "--solve", "eps0", "--eta", "1.1", "--gamma2", "0.9", "--rho", "0.01",
       "--n", "20000"});
  EXPECT_NEAR(inverse["eps0"].get<double>(), 0.8, 1e-4);
}

TEST_F(CliTest, RiskUsageErrors) {
  EXPECT_EQ(Invoke({"risk", "--eps0", "1", "--eps", "0.5", "--gamma", "0.5"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"risk", "--eps", "0.5"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"risk", "--case", "2", "--gamma2", "0.5"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"risk", "--case", "4"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"risk", "--eps0", "abc"}).code, kExitUsage);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, RiskTargetOutOfReachIsInfeasible) {
  // gamma below P(T <= eps) cannot be reached by any eps0.
  const Outcome r = Invoke({"risk", "--eps", "2", "--gamma", "0.5", "--solve",
                         "eps0"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_THAT(r.err, HasSubstr("error:"));
}

TEST_F(CliTest, RiskJsonRoundTrips) {
  for (const std::vector<std::string>& args :
       std::vector<std::vector<std::string>>{
           {"risk", "--eps0", "0.5", "--eps", "0.27"},
           {"risk", "--case", "2", "--gamma2", "0.5", "--rho", "0.01", "--n",
            "10000"},
           {"risk", "--case", "3", "--eps", "0.3", "--eps0", "0.8", "--eta",
            "1.1", "--gamma2", "0.9", "--rho", "0.01", "--n", "20000"}}) {
    const Outcome r = Invoke(args);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    PAR_ASSERT_OK_AND_ASSIGN(const RiskAssessment a,
                             RiskAssessmentFromJson(r.out));
    EXPECT_EQ(RiskAssessmentToJson(a) + "\n", r.out);
  }
}

TEST_F(CliTest, SampleSize) {
  const Json j = RunJson({"sample-size", "--rho", "0.01", "--alpha", "0.9"});
  EXPECT_EQ(j["n"], 14979);
  const Json t = RunJson({"sample-size", "--rho", "0.01", "--n", "15000"});
  EXPECT_NEAR(t["tolerance"].get<double>(), 0.9004, 1e-4);
  EXPECT_EQ(Invoke({"sample-size", "--rho", "0.01"}).code, kExitUsage);
}

TEST_F(CliTest, BudgetOptimize) {
  const Outcome r = Invoke({"budget", "--eps0", "0.5", "--E", "5500", "--c", "1",
                         "--Emin", "0", "--N", "100", "--optimize"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["eps_min"].get<double>(), 0.274, 0.001);
  EXPECT_NEAR(j["budget"].get<double>(), 37805.86, 1.0);
  EXPECT_DOUBLE_EQ(j["budget"].get<double>(), 37805.86);
  PAR_ASSERT_OK_AND_ASSIGN(const BudgetOptimum o, BudgetOptimumFromJson(r.out));
  EXPECT_EQ(BudgetOptimumToJson(0.5, o) + "\n", r.out);
}

TEST_F(CliTest, BudgetIntervalExitCodes) {
  const std::vector<std::string> base = {"budget", "--eps0", "0.5", "--E",
                                         "5500",   "--N",    "100",  "--gamma",
                                         "0.61",   "--mae-max", "2"};
  auto with_cap = [&](const std::string& cap) {
    std::vector<std::string> args = base;
    args.push_back("--budget-cap");
    args.push_back(cap);
    return Invoke(args);
  };
  const Outcome tight = with_cap("60000");
  EXPECT_EQ(tight.code, kExitFailure);
  EXPECT_FALSE(Json::parse(tight.out)["feasible"].get<bool>());
  const Outcome roomy = with_cap("80000");
  EXPECT_EQ(roomy.code, kExitOk) << roomy.err;
  EXPECT_TRUE(Json::parse(roomy.out)["feasible"].get<bool>());
  EXPECT_EQ(Invoke({"budget", "--eps0", "0.5", "--E", "5500"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"budget", "--eps0", "0.5", "--E", "5500", "--optimize",
                 "--curve", "10"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, BudgetCurveIsCsv) {
  const Outcome r = Invoke({"budget", "--eps0", "0.5", "--E", "5500", "--N",
                         "100", "--curve", "25"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  PAR_ASSERT_OK_AND_ASSIGN(const CsvTable table, ReadCsv(in));
  EXPECT_THAT(table.header, ::testing::ElementsAre("eps", "gamma", "budget"));
  EXPECT_EQ(table.values.rows(), 25);
}

TEST_F(CliTest, ComposeParBelowAdvanced) {
  const Outcome r =
      Invoke({"compose", "--eps0", "0.5", "--delta", "1e-5", "--n-max", "50",
           "--eps", "0.27", "--gamma", "0.61"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  PAR_ASSERT_OK_AND_ASSIGN(const CsvTable table, ReadCsv(in));
  ASSERT_EQ(table.values.rows(), 50);
  ASSERT_EQ(table.header[2], "advanced");
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    EXPECT_LT(table.values(i, 3), table.values(i, 2)) << "n=" << i + 1;
  }
}

TEST_F(CliTest, ComposeLedger) {
  const std::string path = ::testing::TempDir() + "/ledger.csv";
  {
    std::ofstream file(path);
    file << "eps0,eps,gamma\n0.1,0.08,0.8\n0.1,0.08,0.8\n";
  }
  const Json j = RunJson({"compose", "--ledger", path});
  EXPECT_EQ(j["mechanisms"], 2);
  EXPECT_GT(j["eps"].get<double>(), 0.0);
  EXPECT_EQ(Invoke({"compose", "--ledger", path, "--eps0", "1"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"compose", "--ledger", path + ".missing"}).code,
            kExitFailure);
}

TEST_F(CliTest, SensitivityDeterministicAndSeeded) {
  const std::vector<std::string> args = {
      "sensitivity", "--synthetic", "300", "--features", "2", "--query",
      "mean",        "--p",         "20",  "--n",        "500", "--seed", "9"};
  const Outcome a = Invoke(args);
  const Outcome b = Invoke(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(Json::parse(a.out)["seed"], 9);

  // PAR_SEED stands in for --seed.
  std::vector<std::string> no_seed(args.begin(), args.end() - 2);
  setenv("PAR_SEED", "9", 1);
  EXPECT_EQ(Invoke(no_seed).out, a.out);
  setenv("PAR_SEED", "nine", 1);
  EXPECT_EQ(Invoke(no_seed).code, kExitUsage);
  unsetenv("PAR_SEED");
}

TEST_F(CliTest, SensitivityCsvCarriesSeedAndReparses) {
  const Outcome r =
      Invoke({"sensitivity", "--synthetic", "300", "--features", "2", "--p", "20",
           "--n", "200", "--seed", "4", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("# seed=4\n", 0), 0u);
  std::istringstream in(r.out);
  PAR_ASSERT_OK_AND_ASSIGN(const CsvTable table, ReadCsv(in));
  EXPECT_THAT(table.header, ::testing::ElementsAre("value", "cdf"));
  EXPECT_DOUBLE_EQ(table.values(table.values.rows() - 1, 1), 1.0);
}

TEST_F(CliTest, SensitivityFromCsvFile) {
  const std::string path = ::testing::TempDir() + "/records.csv";
  {
    std::ofstream file(path);
    file << "y,x1\n0,1\n1,2\n0.5,3\n0.25,1\n";
  }
  const Json j = RunJson({"sensitivity", "--data", path, "--query", "count",
                          "--p", "2", "--n", "50", "--seed", "1"});
  EXPECT_EQ(j["sampled_sensitivity"].get<double>(), 0.0);
  EXPECT_EQ(Invoke({"sensitivity", "--data", path, "--synthetic", "10", "--p",
                 "2"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, RmseCsvIsSeededAndDeterministic) {
  const std::vector<std::string> args = {
      "rmse", "--synthetic", "500", "--features", "3", "--eps0", "0.5,2",
      "--runs", "4", "--seed", "6"};
  const Outcome a = Invoke(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, Invoke(args).out);
  EXPECT_EQ(a.out.rfind("# seed=6 ", 0), 0u);
  std::istringstream in(a.out);
  PAR_ASSERT_OK_AND_ASSIGN(const CsvTable table, ReadCsv(in));
  EXPECT_THAT(table.header, ::testing::ElementsAre("eps0", "run", "rmse"));
  EXPECT_EQ(table.values.rows(), 8);
}

TEST_F(CliTest, VerifyPassesAndReportsJson) {
  const Outcome r = Invoke({"verify", "--target", "composition"});
  ASSERT_EQ(r.code, kExitOk) << r.out;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const Json& report : j["reports"]) {
    PAR_ASSERT_OK_AND_ASSIGN(const ValidationReport parsed,
                             ReportFromJson(report.dump()));
    EXPECT_TRUE(parsed.pass) << parsed.target;
  }
  const Json g = RunJson(
      {"verify", "--target", "gamma1", "--samples", "200000", "--seed", "2"});
  EXPECT_EQ(g["reports"].size(), 9u);
  EXPECT_EQ(Invoke({"verify", "--target", "nothing"}).code, kExitUsage);
}

TEST_F(CliTest, VerifyFailsWhenOracleStarved) {
  // 2000 draws keep too few samples below eps0 = 0.1 for k = 5.
  const Outcome r = Invoke({"verify", "--target", "gamma1", "--samples", "2000"});
  EXPECT_EQ(r.code, kExitFailure);
}

TEST(RoundingTest, SignificantDigitsAndCents) {
  EXPECT_DOUBLE_EQ(RoundSignificant(0.60933737123), 0.609337);
  EXPECT_DOUBLE_EQ(RoundSignificant(0.0), 0.0);
  EXPECT_DOUBLE_EQ(RoundCents(74434.4058), 74434.41);
  EXPECT_DOUBLE_EQ(RoundCents(37805.8566), 37805.86);
}

}  // namespace
}  // namespace par
