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


// Simulation oracles used to validate the analytic privacy-at-risk formulas.
//
// Draws are split into chunks of kMcChunk; chunk i uses the stream
// Rng(DeriveSeed(seed, i)) and per-chunk counts are summed, so every
// estimate depends only on (seed, samples) and not on the worker count.

#ifndef PAR_MONTECARLO_ORACLE_H_
#define PAR_MONTECARLO_ORACLE_H_

#include <cstdint>
#include <string>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "par/random.h"
#include "par/sensitivity_estimation.h"

namespace par {

inline constexpr std::int64_t kMcChunk = 1 << 16;
// Minimum number of accepted draws behind a conditional estimate.
inline constexpr std::int64_t kMinKept = 1000;

struct McConfig {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int workers = 1;

  absl::Status Validate() const;
};

// A binomial proportion with its normal-approximation standard error.
struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  // Draws that entered the proportion, and draws simulated.
  std::int64_t kept = 0;
  std::int64_t total = 0;
};

// Gamma(k, 1) as the sum of k unit exponentials.
double GammaSample(int k, Rng& rng);

// Fraction of T = |G1 - G2| <= eps among draws with T <= eps0,
// G_i ~ Gamma(k, 1). Fails with ResourceExhausted when fewer than kMinKept
// draws are accepted.
absl::StatusOr<McEstimate> McGamma1(double eps, double eps0, int k,
                                    const McConfig& cfg);

// gamma2 times the conditional fraction with truncation point eta * eps0.
absl::StatusOr<McEstimate> McGamma3(double eps, double eps0, int k,
                                    double eta, double gamma2,
                                    const McConfig& cfg);

// P[|ln(p_x(z) / p_y(z))| <= eps] for z = fx + Laplace noise calibrated to
// ||fx - fy||_1 / eps0, estimated directly at the mechanism level.
absl::StatusOr<McEstimate> McMechanismLoss(double eps, double eps0,
                                           const Eigen::VectorXd& fx,
                                           const Eigen::VectorXd& fy,
                                           const McConfig& cfg);

// Frequency of ||f(x) - f(y)||_1 <= sampled_sensitivity over fresh
// neighbour pairs of p records.
absl::StatusOr<McEstimate> McCase2Validation(const DataSource& src,
                                             const QuerySpec& q, int p,
                                             double sampled_sensitivity,
                                             const McConfig& cfg);

// Overlapping mass of the zero-mean Laplace densities with scales
// sensitivity / eps1 and sensitivity / eps2, as the sample mean of
// min(1, p_narrow(X) / p_wide(X)) over X drawn from the wider density.
absl::StatusOr<McEstimate> McOverlap(double eps1, double eps2,
                                     double sensitivity, const McConfig& cfg);

struct ValidationReport {
  std::string target;
  double analytic = 0.0;
  double mc_estimate = 0.0;
  double standard_error = 0.0;
  double gap = 0.0;
  bool pass = false;
};

// Passes when |analytic - estimate| <= max(sigmas * stderr, floor).
ValidationReport Compare(std::string target, double analytic,
                         const McEstimate& mc, double sigmas = 4.0,
                         double floor = 0.0);

// {"target", "analytic", "mc_estimate", "stderr", "gap", "pass"}.
std::string ReportToJson(const ValidationReport& report);
absl::StatusOr<ValidationReport> ReportFromJson(const std::string& text);

}  // namespace par

#endif  // PAR_MONTECARLO_ORACLE_H_
