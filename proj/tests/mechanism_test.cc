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


#include "par/mechanism.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/status_matchers.h"

namespace par {
namespace {

using ::par::testing::IsOkAndHolds;
using ::par::testing::StatusIs;
using ::testing::DoubleNear;

double LaplaceCdf(double x, double b) {
  return x < 0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

// Numeric min-integral of two zero-mean Laplace densities on a fine grid.
double OverlapOracle(double eps1, double eps2, double sensitivity) {
  const double b1 = sensitivity / eps1, b2 = sensitivity / eps2;
  const double h = 1e-4;
  double sum = 0.0;
  for (double x = 0.5 * h; x < 60.0; x += h) {
    sum += std::min(std::exp(-x / b1) / (2 * b1), std::exp(-x / b2) / (2 * b2));
  }
  return 2.0 * sum * h;
}

DataSource Synthetic(std::int64_t records, int features, std::uint64_t seed) {
  absl::StatusOr<DataSource> src =
      Normalize(GenerateRegressionData(records, features, seed), 0);
  EXPECT_TRUE(src.ok()) << src.status();
  return *std::move(src);
}

TEST(LaplaceSampleTest, InverseCdfExamples) {
  EXPECT_EQ(LaplaceFromUniform(1.0, 0.5), 0.0);
  EXPECT_NEAR(LaplaceFromUniform(1.0, 0.75), std::log(2.0), 1e-15);
  EXPECT_NEAR(LaplaceFromUniform(1.0, 0.25), -std::log(2.0), 1e-15);
  for (double u : {0.01, 0.3, 0.6, 0.999}) {
    EXPECT_NEAR(LaplaceCdf(LaplaceFromUniform(2.5, u), 2.5), u, 1e-12);
  }
}

TEST(LaplaceSampleTest, Moments) {
  constexpr int kDraws = 1'000'000;
  const double b = 2.0;
  Rng rng(42);
  double sum = 0.0, abs_sum = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = LaplaceSample(b, rng);
    sum += x;
    abs_sum += std::abs(x);
  }
  // Var X = 2 b^2, Var |X| = b^2.
  EXPECT_NEAR(sum / kDraws, 0.0, 5 * std::sqrt(2 * b * b / kDraws));
  EXPECT_NEAR(abs_sum / kDraws, b, 5 * std::sqrt(b * b / kDraws));
  EXPECT_NEAR(abs_sum / kDraws, 2.0, 0.01);
}

TEST(LaplaceSampleTest, KolmogorovSmirnovDistance) {
  constexpr int kDraws = 100'000;
  Rng rng(7);
  std::vector<double> z(kDraws);
  for (double& x : z) x = LaplaceSample(3.0, rng) / 3.0;
  std::sort(z.begin(), z.end());
  double ks = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double f = LaplaceCdf(z[i], 1.0);
    ks = std::max({ks, std::abs((i + 1.0) / kDraws - f),
                   std::abs(static_cast<double>(i) / kDraws - f)});
  }
  EXPECT_LE(ks, 0.01);
}

TEST(LaplaceMechanismTest, CreateValidates) {
  EXPECT_THAT(LaplaceMechanism::Create(0.0, 1.0, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(LaplaceMechanism::Create(1.0, -1.0, 1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(LaplaceMechanism::Create(1.0, 1.0, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                           LaplaceMechanism::Create(1.0, 0.5, 3));
  EXPECT_EQ(m.scale(), 2.0);
  Rng rng(1);
  EXPECT_THAT(m.Apply(Eigen::VectorXd::Zero(2), rng),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(LaplaceMechanismTest, ApplyAddsNoise) {
  const Eigen::Vector3d truth(1.0, -2.0, 0.5);
  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism tiny,
                           LaplaceMechanism::Create(1e-12, 1e3, 3));
  Rng rng(3);
  PAR_ASSERT_OK_AND_ASSIGN(const Eigen::VectorXd near, tiny.Apply(truth, rng));
  EXPECT_LT((near - truth).cwiseAbs().maxCoeff(), 1e-12);

  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                           LaplaceMechanism::Create(1.0, 0.5, 3));
  Rng a(11), b(11);
  PAR_ASSERT_OK_AND_ASSIGN(const Eigen::VectorXd first, m.Apply(truth, a));
  PAR_ASSERT_OK_AND_ASSIGN(const Eigen::VectorXd second, m.Apply(truth, b));
  EXPECT_EQ(first, second);

  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism scalar,
                           LaplaceMechanism::Create(1.0, 0.5, 1));
  Rng rng2(12);
  double mae = 0.0;
  constexpr int kDraws = 100'000;
  for (int i = 0; i < kDraws; ++i) {
    PAR_ASSERT_OK_AND_ASSIGN(const Eigen::VectorXd out,
                             scalar.Apply(Eigen::VectorXd::Zero(1), rng2));
    mae += std::abs(out(0));
  }
  EXPECT_NEAR(mae / kDraws, 2.0, 0.05);
}

TEST(ExpectedMaeTest, Examples) {
  EXPECT_THAT(ExpectedMae(1.0, 0.5), IsOkAndHolds(2.0));
  EXPECT_THAT(ExpectedMae(1.0, 1.0), IsOkAndHolds(1.0));
  EXPECT_THAT(ExpectedMae(3.0, 0.5), IsOkAndHolds(6.0));
  EXPECT_THAT(ExpectedMae(1.0, 0.0), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(OverlapTest, Examples) {
  EXPECT_THAT(Overlap(1.0, 0.6, 1.0), IsOkAndHolds(DoubleNear(0.81, 0.005)));
  EXPECT_THAT(Overlap(1.0, 0.6, 1.0),
              IsOkAndHolds(DoubleNear(OverlapOracle(1.0, 0.6, 1.0), 1e-6)));
  EXPECT_THAT(Overlap(0.7, 0.7, 2.0), IsOkAndHolds(1.0));
  EXPECT_THAT(Overlap(0.0, 0.7, 2.0), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(OverlapTest, SymmetricAndScaleFree) {
  for (double e1 : {0.1, 0.5, 2.0}) {
    for (double e2 : {0.2, 0.6, 3.0}) {
      PAR_ASSERT_OK_AND_ASSIGN(const double o, Overlap(e1, e2, 1.0));
      EXPECT_THAT(Overlap(e2, e1, 1.0), IsOkAndHolds(o));
      EXPECT_THAT(Overlap(e1, e2, 4.0), IsOkAndHolds(DoubleNear(o, 1e-14)));
      EXPECT_GT(o, 0.0);
      EXPECT_LE(o, 1.0);
      EXPECT_NEAR(o, OverlapOracle(e1, e2, 1.0), 1e-5);
    }
  }
}

TEST(NoiseDifferenceTest, LossIsBoundedBySensitivity) {
  // For any z: |sum_i |f(y)_i - z_i| - |f(x)_i - z_i|| <= ||f(x) - f(y)||_1.
  Rng rng(5);
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 1 + trial % 6;
    Eigen::VectorXd fx(k), fy(k), z(k);
    for (int i = 0; i < k; ++i) {
      fx(i) = rng.Normal();
      fy(i) = rng.Normal();
      z(i) = 3.0 * rng.Normal();
    }
    const double diff =
        (fy - z).cwiseAbs().sum() - (fx - z).cwiseAbs().sum();
    EXPECT_LE(std::abs(diff), (fx - fy).lpNorm<1>() + 1e-12);
  }
}

// Privacy loss ln(p_x(z) / p_y(z)) of a Laplace release with scale b.
double Loss(const Eigen::VectorXd& fx, const Eigen::VectorXd& fy,
            const Eigen::VectorXd& z, double b) {
  return ((fy - z).cwiseAbs().sum() - (fx - z).cwiseAbs().sum()) / b;
}

TEST(PostProcessingTest, ProjectionAndClampingDoNotIncreaseRisk) {
  const double eps0 = 1.0, eps = 0.5;
  constexpr int kDraws = 200'000;

  // Projection of a 2-d release onto its first coordinate.
  {
    Eigen::Vector2d fx(0.0, 0.0), fy(0.5, 0.5);
    const double b = (fx - fy).lpNorm<1>() / eps0;
    PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                             LaplaceMechanism::Create(b * eps0, eps0, 2));
    Rng rng(21);
    int within_m = 0, within_proj = 0;
    for (int i = 0; i < kDraws; ++i) {
      PAR_ASSERT_OK_AND_ASSIGN(const Eigen::VectorXd z, m.Apply(fx, rng));
      if (std::abs(Loss(fx, fy, z, b)) <= eps) ++within_m;
      // Marginal densities of the first coordinate.
      const double proj = (std::abs(fy(0) - z(0)) - std::abs(fx(0) - z(0))) / b;
      if (std::abs(proj) <= eps) ++within_proj;
    }
    const double pm = static_cast<double>(within_m) / kDraws;
    const double pp = static_cast<double>(within_proj) / kDraws;
    EXPECT_GE(pp, pm - 2 * std::sqrt(pm * (1 - pm) / kDraws));
  }

  // Clamping a 1-d release to [lo, hi]; the atoms carry the tail ratio.
  {
    const double fx = 0.0, fy = 1.0, b = 1.0 / eps0, lo = -0.5, hi = 1.5;
    auto tail_low = [&](double mean) { return LaplaceCdf(lo - mean, b); };
    auto tail_high = [&](double mean) { return 1.0 - LaplaceCdf(hi - mean, b); };
    Rng rng(22);
    int within_m = 0, within_clamp = 0;
    for (int i = 0; i < kDraws; ++i) {
      const double z = fx + LaplaceSample(b, rng);
      const double loss = (std::abs(fy - z) - std::abs(fx - z)) / b;
      if (std::abs(loss) <= eps) ++within_m;
      double clamped_loss = loss;
      if (z <= lo) clamped_loss = std::log(tail_low(fx) / tail_low(fy));
      if (z >= hi) clamped_loss = std::log(tail_high(fx) / tail_high(fy));
      if (std::abs(clamped_loss) <= eps) ++within_clamp;
    }
    const double pm = static_cast<double>(within_m) / kDraws;
    const double pc = static_cast<double>(within_clamp) / kDraws;
    EXPECT_GE(pc, pm - 2 * std::sqrt(pm * (1 - pm) / kDraws));
  }
}

TEST(RmseExperimentTest, NoiselessLimitAndDeterminism) {
  const DataSource src = Synthetic(2000, 4, 8);
  const QuerySpec ridge{.kind = QueryKind::kRidge, .lambda = 0.01};
  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism quiet,
                           LaplaceMechanism::Create(1e-14, 1e3, 4));
  PAR_ASSERT_OK_AND_ASSIGN(const RmseResult result,
                           RmseExperiment(src, ridge, quiet, {.runs = 5, .seed = 2}));
  EXPECT_NEAR(result.mean_rmse, result.noiseless_rmse, 1e-9);

  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                           LaplaceMechanism::Create(0.05, 1.0, 4));
  PAR_ASSERT_OK_AND_ASSIGN(const RmseResult a,
                           RmseExperiment(src, ridge, m, {.runs = 1, .seed = 3}));
  PAR_ASSERT_OK_AND_ASSIGN(const RmseResult b,
                           RmseExperiment(src, ridge, m, {.runs = 1, .seed = 3}));
  EXPECT_EQ(a.run_rmse, b.run_rmse);
  PAR_ASSERT_OK_AND_ASSIGN(
      const RmseResult threaded,
      RmseExperiment(src, ridge, m, {.runs = 9, .seed = 3, .workers = 3}));
  PAR_ASSERT_OK_AND_ASSIGN(
      const RmseResult serial,
      RmseExperiment(src, ridge, m, {.runs = 9, .seed = 3, .workers = 1}));
  EXPECT_EQ(threaded.run_rmse, serial.run_rmse);
}

TEST(RmseExperimentTest, ErrorDecreasesWithEps0) {
  const DataSource src = Synthetic(3000, 5, 10);
  const QuerySpec ridge{.kind = QueryKind::kRidge, .lambda = 0.01};
  std::vector<double> means;
  for (double eps0 : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m,
                             LaplaceMechanism::Create(0.1, eps0, 5));
    PAR_ASSERT_OK_AND_ASSIGN(const RmseResult r,
                             RmseExperiment(src, ridge, m, {.runs = 50, .seed = 4}));
    means.push_back(r.mean_rmse);
  }
  int inversions = 0;
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[i - 1]) ++inversions;
  }
  EXPECT_LE(inversions, 1);
}

TEST(RmseExperimentTest, ValidatesAndWritesCsv) {
  const DataSource src = Synthetic(100, 3, 1);
  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m3,
                           LaplaceMechanism::Create(0.1, 1.0, 3));
  PAR_ASSERT_OK_AND_ASSIGN(const LaplaceMechanism m2,
                           LaplaceMechanism::Create(0.1, 1.0, 2));
  const QuerySpec ridge{.kind = QueryKind::kRidge};
  EXPECT_THAT(RmseExperiment(src, ridge, m2, {}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(RmseExperiment(src, {.kind = QueryKind::kSum}, m3, {}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(RmseExperiment(src, ridge, m3, {.train_fraction = 1.0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(RmseExperiment(src, ridge, m3, {.runs = 0}),
              StatusIs(absl::StatusCode::kInvalidArgument));

  PAR_ASSERT_OK_AND_ASSIGN(const RmseResult r,
                           RmseExperiment(src, ridge, m3, {.runs = 3}));
  std::ostringstream out;
  WriteRmseCsv(out, 1.0, r, /*header=*/true);
  std::istringstream in(out.str());
  PAR_ASSERT_OK_AND_ASSIGN(const CsvTable table, ReadCsv(in));
  ASSERT_EQ(table.values.rows(), 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(table.values(i, 0), 1.0);
    EXPECT_EQ(table.values(i, 1), i);
    EXPECT_EQ(table.values(i, 2), r.run_rmse[i]);
  }
}

}  // namespace
}  // namespace par
