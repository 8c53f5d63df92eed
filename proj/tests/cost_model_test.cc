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


#include "par/cost_model.h"

#include <cmath>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "par/risk_analysis.h"
#include "par/sensitivity_estimation.h"
#include "testing/status_matchers.h"

namespace par {
namespace {

using ::par::testing::IsOkAndHolds;
using ::par::testing::StatusIs;
using ::testing::DoubleNear;

const CostModelParams kClinic{.E = 5500, .E_min = 0, .c = 1, .N = 100};

// Stationary points of the k = 1 model from an independent bracketing
// solver (scipy brentq, xtol 1e-15).
struct OptimumCase {
  double eps0;
  double eps_min;
  double gamma;
};
constexpr OptimumCase kOptima[] = {
    {0.1, 0.07904691951419951, 0.7986692718246676},
    {0.5, 0.27411528355759013, 0.6093373712378064},
    {1.0, 0.42116209131754584, 0.5437511568074378},
};

TEST(CostParamsTest, Validation) {
  EXPECT_THAT(DpCost(1.0, {.E = 0}), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(DpCost(1.0, {.E = 10, .E_min = 20}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(DpCost(1.0, {.E = 10, .c = 0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(DpCost(1.0, {.E = 10, .N = 0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(DpCost(0.0, kClinic), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(DpCostTest, Examples) {
  EXPECT_THAT(DpCost(0.5, kClinic),
              IsOkAndHolds(DoubleNear(5500 * std::exp(-2.0), 1e-9)));
  EXPECT_THAT(DpCost(0.5, kClinic), IsOkAndHolds(DoubleNear(744.344, 1e-3)));
  EXPECT_THAT(DpCost(1e9, kClinic), IsOkAndHolds(DoubleNear(5500, 1e-4)));
  EXPECT_THAT(DpCost(1.0, {.E = 1000, .E_min = 10, .c = 2}),
              IsOkAndHolds(DoubleNear(145.3352832366127, 1e-9)));
}

TEST(DpCostTest, SatisfiesModelConstraints) {
  const CostModelParams p{.E = 1000, .E_min = 25, .c = 0.7};
  EXPECT_THAT(DpCost(1e-6, p), IsOkAndHolds(DoubleNear(25, 1e-9)));
  EXPECT_THAT(DpCost(1e12, p), IsOkAndHolds(DoubleNear(1025, 1e-6)));
  double previous = 0.0;
  for (double eps = 0.01; eps < 1000; eps *= 1.1) {
    PAR_ASSERT_OK_AND_ASSIGN(const double cost, DpCost(eps, p));
    EXPECT_GE(cost, previous);
    EXPECT_LE(cost, 1025.0);
    EXPECT_GE(cost, 25.0);
    previous = cost;
  }
}

TEST(ParCostTest, Examples) {
  PAR_ASSERT_OK_AND_ASSIGN(const double dp, DpCost(0.5, kClinic));
  EXPECT_THAT(ParCost(0.5, 0.5, kClinic, 1), IsOkAndHolds(DoubleNear(dp, 1e-12)));
  EXPECT_THAT(ParCost(0.274, 0.5, kClinic, 1),
              IsOkAndHolds(DoubleNear(378.0586698191686, 1e-6)));
  EXPECT_THAT(ParCost(1e-9, 0.5, kClinic, 1), IsOkAndHolds(DoubleNear(dp, 1e-5)));
  EXPECT_THAT(ParCost(0.6, 0.5, kClinic, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ParCostTest, CustomConfidence) {
  const ConfidenceFn half = [](double) -> absl::StatusOr<double> { return 0.5; };
  PAR_ASSERT_OK_AND_ASSIGN(const double a, DpCost(0.3, kClinic));
  PAR_ASSERT_OK_AND_ASSIGN(const double b, DpCost(0.5, kClinic));
  EXPECT_THAT(ParCost(0.3, 0.5, kClinic, 1, half),
              IsOkAndHolds(DoubleNear(0.5 * a + 0.5 * b, 1e-12)));
  const ConfidenceFn bad = [](double) -> absl::StatusOr<double> { return 2.0; };
  EXPECT_THAT(ParCost(0.3, 0.5, kClinic, 1, bad),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(BudgetTest, ClinicExample) {
  EXPECT_THAT(DpBudget(0.5, kClinic), IsOkAndHolds(DoubleNear(74434.40, 0.01)));
  EXPECT_THAT(Budget(0.5, 0.5, kClinic, 1),
              IsOkAndHolds(DoubleNear(74434.40, 0.01)));
  EXPECT_THAT(Budget(0.274, 0.5, kClinic, 1),
              IsOkAndHolds(DoubleNear(37805.86, 1.0)));
  CostModelParams single = kClinic;
  single.N = 1;
  PAR_ASSERT_OK_AND_ASSIGN(const double per_person,
                           ParCost(0.3, 0.5, single, 1));
  EXPECT_THAT(Budget(0.3, 0.5, single, 1), IsOkAndHolds(per_person));
}

TEST(EpsilonMinTest, MatchesStationaryPoint) {
  for (const OptimumCase& c : kOptima) {
    PAR_ASSERT_OK_AND_ASSIGN(const double golden, EpsilonMin(c.eps0, kClinic, 1));
    PAR_ASSERT_OK_AND_ASSIGN(const double newton, EpsilonMinStationary(c.eps0));
    EXPECT_NEAR(golden, c.eps_min, 1e-6) << c.eps0;
    EXPECT_NEAR(newton, c.eps_min, 1e-12) << c.eps0;
    EXPECT_NEAR(golden, newton, 1e-4);
    EXPECT_THAT(Gamma1(golden, c.eps0, 1), IsOkAndHolds(DoubleNear(c.gamma, 1e-5)));
  }
}

TEST(EpsilonMinTest, CostOptimalPairs) {
  EXPECT_THAT(EpsilonMin(0.5, kClinic, 1), IsOkAndHolds(DoubleNear(0.274, 1e-3)));
  EXPECT_THAT(EpsilonMin(0.1, kClinic, 1), IsOkAndHolds(DoubleNear(0.08, 0.01)));
  EXPECT_THAT(EpsilonMin(1.0, kClinic, 1), IsOkAndHolds(DoubleNear(0.42, 0.01)));
}

TEST(EpsilonMinTest, HigherDimensionIsInteriorMinimum) {
  PAR_ASSERT_OK_AND_ASSIGN(const double eps_min, EpsilonMin(1.0, kClinic, 3));
  EXPECT_GT(eps_min, 0.0);
  EXPECT_LT(eps_min, 1.0);
  PAR_ASSERT_OK_AND_ASSIGN(const double at_min, ParCost(eps_min, 1.0, kClinic, 3));
  for (double eps : {0.05, 0.2, 0.5, 0.8, 1.0}) {
    PAR_ASSERT_OK_AND_ASSIGN(const double cost, ParCost(eps, 1.0, kClinic, 3));
    EXPECT_GE(cost, at_min - 1e-9);
  }
}

TEST(EpsilonMinTest, FlatCostReturnsEps0) {
  // With zero confidence below eps0 every level costs cost(eps0).
  const ConfidenceFn never = [](double) -> absl::StatusOr<double> { return 0.0; };
  EXPECT_THAT(EpsilonMin(0.5, kClinic, 1, never), IsOkAndHolds(0.5));
}

TEST(OptimizeBudgetTest, ClinicSaving) {
  PAR_ASSERT_OK_AND_ASSIGN(const BudgetOptimum opt, OptimizeBudget(0.5, kClinic, 1));
  EXPECT_NEAR(opt.eps_min, 0.274, 1e-3);
  EXPECT_NEAR(opt.gamma, 0.61, 0.01);
  EXPECT_NEAR(opt.budget, 37805.86, 1.0);
  EXPECT_NEAR(opt.dp_budget, 74434.40, 0.01);
  EXPECT_NEAR(opt.saving, 36628.53, 2.0);
  EXPECT_LE(opt.budget, opt.dp_budget);
}

TEST(ConvexityTest, SecondDifferencesNonNegative) {
  for (int k : {1, 3}) {
    for (double eps0 : {0.1, 0.5, 1.0}) {
      PAR_ASSERT_OK_AND_ASSIGN(const double d2,
                               MinSecondDifference(eps0, kClinic, k));
      EXPECT_GE(d2, -1e-9) << "k=" << k << " eps0=" << eps0;
    }
  }
}

TEST(EpsilonBoundsTest, ErrorCapGivesLowerBound) {
  PAR_ASSERT_OK_AND_ASSIGN(const EpsilonInterval i,
                           EpsilonBounds(2.0, 5000, 0.61, 0.5, kClinic));
  EXPECT_DOUBLE_EQ(i.lower, 0.5);
  // 0.61 * 5500 < 5000 - 0.39 cost(0.5): every level fits the budget.
  EXPECT_FALSE(i.upper.has_value());
  EXPECT_TRUE(i.feasible);
}

TEST(EpsilonBoundsTest, UpperBoundSpendsTheBudget) {
  PAR_ASSERT_OK_AND_ASSIGN(const EpsilonInterval i,
                           EpsilonBounds(2.0, 600, 0.61, 0.5, kClinic));
  ASSERT_TRUE(i.upper.has_value());
  EXPECT_NEAR(*i.upper, 0.41971234806809343, 1e-12);
  // This budget is too small for the error cap.
  EXPECT_FALSE(i.feasible);
  PAR_ASSERT_OK_AND_ASSIGN(const double at_upper, DpCost(*i.upper, kClinic));
  PAR_ASSERT_OK_AND_ASSIGN(const double at_eps0, DpCost(0.5, kClinic));
  EXPECT_NEAR(0.61 * at_upper + 0.39 * at_eps0, 600.0, 1e-6);

  PAR_ASSERT_OK_AND_ASSIGN(const EpsilonInterval roomy,
                           EpsilonBounds(2.0, 800, 0.61, 0.5, kClinic));
  ASSERT_TRUE(roomy.upper.has_value());
  EXPECT_TRUE(roomy.feasible);
  EXPECT_GT(*roomy.upper, 0.5);
}

TEST(EpsilonBoundsTest, GeneralModelUpperBound) {
  const CostModelParams p{.E = 2000, .E_min = 40, .c = 0.8};
  PAR_ASSERT_OK_AND_ASSIGN(const EpsilonInterval i,
                           EpsilonBounds(4.0, 600, 0.7, 1.0, p));
  ASSERT_TRUE(i.upper.has_value());
  PAR_ASSERT_OK_AND_ASSIGN(const double at_upper, DpCost(*i.upper, p));
  PAR_ASSERT_OK_AND_ASSIGN(const double at_eps0, DpCost(1.0, p));
  EXPECT_NEAR(0.7 * at_upper + 0.3 * at_eps0, 600.0, 1e-9);
}

TEST(EpsilonBoundsTest, BudgetBelowFloorIsInfeasible) {
  PAR_ASSERT_OK_AND_ASSIGN(const double cost_eps0, DpCost(0.5, kClinic));
  const double floor = 0.39 * cost_eps0;
  PAR_ASSERT_OK_AND_ASSIGN(const EpsilonInterval just_above,
                           EpsilonBounds(2.0, floor + 1e-6, 0.61, 0.5, kClinic));
  ASSERT_TRUE(just_above.upper.has_value());
  EXPECT_LT(*just_above.upper, 0.1);
  EXPECT_FALSE(just_above.feasible);
  PAR_ASSERT_OK_AND_ASSIGN(const EpsilonInterval below,
                           EpsilonBounds(2.0, floor * 0.5, 0.61, 0.5, kClinic));
  EXPECT_EQ(below.upper, 0.0);
  EXPECT_FALSE(below.feasible);
  EXPECT_THAT(EpsilonBounds(0.0, 600, 0.61, 0.5, kClinic),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(EpsilonBounds(2.0, 600, 0.0, 0.5, kClinic),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(BudgetCurveTest, CsvHasCurrencyAndMinimum) {
  PAR_ASSERT_OK_AND_ASSIGN(const std::vector<BudgetCurvePoint> curve,
                           BudgetCurve(0.5, kClinic, 1, 500));
  ASSERT_EQ(curve.size(), 500u);
  EXPECT_DOUBLE_EQ(curve.back().eps, 0.5);
  EXPECT_NEAR(curve.back().budget, 74434.40, 0.01);
  auto lowest = std::min_element(
      curve.begin(), curve.end(),
      [](const auto& a, const auto& b) { return a.budget < b.budget; });
  EXPECT_NEAR(lowest->eps, 0.274, 1e-3);

  std::ostringstream out;
  WriteBudgetCurveCsv(out, curve);
  std::istringstream in(out.str());
  PAR_ASSERT_OK_AND_ASSIGN(const CsvTable table, ReadCsv(in));
  ASSERT_EQ(table.values.rows(), 500);
  for (int i = 0; i < 500; ++i) {
    EXPECT_EQ(table.values(i, 0), curve[i].eps);
    EXPECT_NEAR(table.values(i, 2), curve[i].budget, 0.005);
  }
  // 550000 e^{-2} = 74434.4058, rounded to cents.
  EXPECT_NE(out.str().find("0.5,1,74434.41\n"), std::string::npos);
}

}  // namespace
}  // namespace par
