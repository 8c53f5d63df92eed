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

// Privacy-at-risk calculations for the Laplace mechanism.
//
// An eps0-differentially private Laplace mechanism also satisfies a stronger
// level eps < eps0 with some confidence gamma. Three sources of randomness
// give three flavours of gamma:
//
//   explicit  (noise only, sensitivity known):   gamma1
//   implicit  (sensitivity estimated by sampling): gamma2, bounded by DKW
//   coupled   (both):                             gamma3
//
// Throughout, gamma is the probability that the level eps is *satisfied*;
// RiskAssessment::violation_risk() is 1 - gamma.

#ifndef PAR_RISK_ANALYSIS_H_
#define PAR_RISK_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace par {

enum class RiskCase { kExplicit, kImplicit, kCoupled };

std::string_view RiskCaseName(RiskCase risk_case);
absl::StatusOr<RiskCase> ParseRiskCase(std::string_view name);

struct RiskAssessment {
  // Privacy level being guaranteed. Always present for the explicit and
  // coupled cases; the implicit-case bound holds for whatever level the
  // sampled-sensitivity mechanism is calibrated to, so it may be absent.
  std::optional<double> epsilon;
  double gamma = 0.0;
  RiskCase risk_case = RiskCase::kExplicit;
  // Privacy level of the calibrated noise, when known.
  std::optional<double> eps0;
  std::optional<double> rho;
  std::optional<std::int64_t> n_samples;
  std::optional<double> eta;

  double violation_risk() const { return 1.0 - gamma; }
  absl::Status Validate() const;

  friend bool operator==(const RiskAssessment&,
                         const RiskAssessment&) = default;
};

// gamma1 = P(T <= eps) / P(T <= eps0) for a k-dimensional query; 1 when
// eps >= eps0.
absl::StatusOr<double> Gamma1(double eps, double eps0, int k);

// The k = 1 closed form (1 - e^{-eps}) / (1 - e^{-eps0}), clamped to 1.
absl::StatusOr<double> Gamma1ClosedFormK1(double eps, double eps0);

// Inverse of Gamma1 in eps: the level met with confidence `gamma` in (0, 1].
// Uses ln(1 / (1 - gamma (1 - e^{-eps0}))) for k = 1 and numerical
// inversion of the CDF otherwise.
absl::StatusOr<double> EpsilonForGamma1(double gamma, double eps0, int k);

// DKW probabilistic tolerance 1 - 2 exp(-2 rho^2 n). Can be negative for
// small n, in which case the bound is vacuous.
double ProbabilisticTolerance(double rho, std::int64_t n);

// Smallest n with ProbabilisticTolerance(rho, n) >= alpha.
absl::StatusOr<std::int64_t> SampleSizeFor(double rho, double alpha);

// Lower bound gamma * max(0, 1 - 2 exp(-2 rho^2 n)) on the empirical
// confidence, for either gamma2 (implicit) or gamma3 (coupled).
absl::StatusOr<double> EmpiricalRiskBound(double gamma, double rho,
                                          std::int64_t n);

// gamma3 = P(T <= eps) / P(T <= eta eps0) * gamma2, clamped to [0, 1].
absl::StatusOr<double> Gamma3(double eps, double eps0, int k, double eta,
                              double gamma2);

// Noise level eps0 >= eps solving gamma P(T <= eps0) - P(T <= eps) = 0.
// NotFound when gamma <= P(T <= eps), since the ratio never drops that low.
absl::StatusOr<double> Epsilon0ForTargetCase1(double eps, double gamma, int k);

// Noise level eps0 solving
//   gamma3_hat P(T <= eta eps0) - alpha gamma2 P(T <= eps) = 0.
// Requires gamma3_hat <= alpha * gamma2; NotFound otherwise.
absl::StatusOr<double> Epsilon0ForTargetCase3(double eps, double gamma3_hat,
                                              double gamma2, double alpha,
                                              double eta, int k);

// delta of the (eps, delta)-probabilistic DP guarantee: 1 - gamma1 for
// eps <= eps0, else 0.
absl::StatusOr<double> PdpDelta(double eps, double eps0, int k);

struct PrivacyAtRisk {
  double epsilon;
  double gamma;
};

struct MixtureGuarantee {
  double epsilon;
  // Probability that `epsilon` holds for the mixture.
  double confidence;
  // 1 - confidence.
  double violation_risk;
};

// Guarantee of the mechanism that runs a mechanism with guarantee `first`
// with probability p and one with `second` otherwise. The privacy loss obeys
//   C <= confidence * epsilon + violation_risk * eps0.
absl::StatusOr<MixtureGuarantee> MixGuarantees(const PrivacyAtRisk& first,
                                               const PrivacyAtRisk& second,
                                               double p);

}  // namespace par

#endif  // PAR_RISK_ANALYSIS_H_
