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

#include "par/risk_analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "par/internal/status_macros.h"
#include "par/loss_distribution.h"

namespace par {
namespace {

absl::Status CheckPositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", value));
  }
  return absl::OkStatus();
}

absl::Status CheckUnitInterval(double value, const char* name,
                               bool allow_zero) {
  const bool low_ok = allow_zero ? value >= 0.0 : value > 0.0;
  if (!low_ok || !(value <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        name, " must lie in ", allow_zero ? "[0, 1]" : "(0, 1]", ", got ",
        value));
  }
  return absl::OkStatus();
}

absl::Status CheckRhoAndN(double rho, std::int64_t n) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("accuracy rho must lie in (0, 1), got ", rho));
  }
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample count must be positive, got ", n));
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view RiskCaseName(RiskCase risk_case) {
  switch (risk_case) {
    case RiskCase::kExplicit:
      return "explicit";
    case RiskCase::kImplicit:
      return "implicit";
    case RiskCase::kCoupled:
      return "coupled";
  }
  return "unknown";
}

absl::StatusOr<RiskCase> ParseRiskCase(std::string_view name) {
  if (name == "explicit" || name == "1") return RiskCase::kExplicit;
  if (name == "implicit" || name == "2") return RiskCase::kImplicit;
  if (name == "coupled" || name == "3") return RiskCase::kCoupled;
  return absl::InvalidArgumentError(absl::StrCat("unknown risk case '", std::string(name),
                                                 "'"));
}

absl::Status RiskAssessment::Validate() const {
  PAR_RETURN_IF_ERROR(CheckUnitInterval(gamma, "gamma", /*allow_zero=*/true));
  if (epsilon.has_value()) {
    PAR_RETURN_IF_ERROR(CheckPositive(*epsilon, "epsilon"));
  } else if (risk_case != RiskCase::kImplicit) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epsilon is required for the ", std::string(RiskCaseName(risk_case)), " case"));
  }
  if (eps0.has_value()) PAR_RETURN_IF_ERROR(CheckPositive(*eps0, "eps0"));
  const bool sampled = risk_case != RiskCase::kExplicit;
  if (rho.has_value() != sampled || n_samples.has_value() != sampled) {
    return absl::InvalidArgumentError(
        "rho and n_samples must be present exactly for the implicit and "
        "coupled cases");
  }
  if (sampled) PAR_RETURN_IF_ERROR(CheckRhoAndN(*rho, *n_samples));
  if (eta.has_value() != (risk_case == RiskCase::kCoupled)) {
    return absl::InvalidArgumentError(
        "eta must be present exactly for the coupled case");
  }
  if (eta.has_value()) PAR_RETURN_IF_ERROR(CheckPositive(*eta, "eta"));
  return absl::OkStatus();
}

absl::StatusOr<double> Gamma1(double eps, double eps0, int k) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  if (eps >= eps0) return 1.0;
  PAR_ASSIGN_OR_RETURN(const LossDistribution dist, LossDistribution::Create(k));
  return dist.TruncatedRatio(eps, eps0);
}

absl::StatusOr<double> Gamma1ClosedFormK1(double eps, double eps0) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  if (eps >= eps0) return 1.0;
  return std::expm1(-eps) / std::expm1(-eps0);
}

absl::StatusOr<double> EpsilonForGamma1(double gamma, double eps0, int k) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  PAR_RETURN_IF_ERROR(CheckUnitInterval(gamma, "gamma", /*allow_zero=*/false));
  if (gamma == 1.0) return eps0;
  if (k == 1) {
    // ln(1 / (1 - gamma (1 - e^{-eps0})))
    return -std::log1p(gamma * std::expm1(-eps0));
  }
  PAR_ASSIGN_OR_RETURN(const LossDistribution dist, LossDistribution::Create(k));
  PAR_ASSIGN_OR_RETURN(const double mass, dist.Cdf(eps0));
  PAR_ASSIGN_OR_RETURN(const double eps, dist.Quantile(gamma * mass));
  return std::min(eps, eps0);
}

double ProbabilisticTolerance(double rho, std::int64_t n) {
  return 1.0 - 2.0 * std::exp(-2.0 * rho * rho * static_cast<double>(n));
}

absl::StatusOr<std::int64_t> SampleSizeFor(double rho, double alpha) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("accuracy rho must lie in (0, 1), got ", rho));
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("tolerance alpha must lie in (0, 1), got ", alpha));
  }
  const double exact = std::log(2.0 / (1.0 - alpha)) / (2.0 * rho * rho);
  if (!(exact < 9.0e18)) {
    return absl::OutOfRangeError(
        absl::StrCat("required sample size ", exact, " is not representable"));
  }
  auto n = static_cast<std::int64_t>(std::ceil(exact));
  // Guard the ceiling against rounding in `exact`.
  while (n > 1 && ProbabilisticTolerance(rho, n - 1) >= alpha) --n;
  while (ProbabilisticTolerance(rho, n) < alpha) ++n;
  return std::max<std::int64_t>(n, 1);
}

absl::StatusOr<double> EmpiricalRiskBound(double gamma, double rho,
                                          std::int64_t n) {
  PAR_RETURN_IF_ERROR(CheckUnitInterval(gamma, "gamma", /*allow_zero=*/true));
  PAR_RETURN_IF_ERROR(CheckRhoAndN(rho, n));
  return gamma * std::max(0.0, ProbabilisticTolerance(rho, n));
}

absl::StatusOr<double> Gamma3(double eps, double eps0, int k, double eta,
                              double gamma2) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  PAR_RETURN_IF_ERROR(CheckPositive(eta, "eta"));
  PAR_RETURN_IF_ERROR(CheckUnitInterval(gamma2, "gamma2", /*allow_zero=*/true));
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  PAR_ASSIGN_OR_RETURN(const LossDistribution dist, LossDistribution::Create(k));
  PAR_ASSIGN_OR_RETURN(const double ratio, dist.TruncatedRatio(eps, eta * eps0));
  return std::clamp(ratio * gamma2, 0.0, 1.0);
}

absl::StatusOr<double> Epsilon0ForTargetCase1(double eps, double gamma,
                                              int k) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps, "eps"));
  PAR_RETURN_IF_ERROR(CheckUnitInterval(gamma, "gamma", /*allow_zero=*/false));
  if (gamma == 1.0) return eps;
  PAR_ASSIGN_OR_RETURN(const LossDistribution dist, LossDistribution::Create(k));
  PAR_ASSIGN_OR_RETURN(const double mass_eps, dist.Cdf(eps));
  const double target = mass_eps / gamma;
  if (!(target < 1.0)) {
    return absl::NotFoundError(absl::StrCat(
        "confidence ", gamma, " is unreachable for eps = ", eps,
        ": the ratio P(T <= eps) / P(T <= eps0) never drops below ",
        mass_eps));
  }
  PAR_ASSIGN_OR_RETURN(const double eps0, dist.Quantile(target));
  PAR_ASSIGN_OR_RETURN(const double mass_eps0, dist.Cdf(eps0));
  const double residual = gamma * mass_eps0 - mass_eps;
  if (std::abs(residual) > 1e-9) {
    return absl::InternalError(
        absl::StrCat("eps0 root residual ", residual, " exceeds 1e-9"));
  }
  return std::max(eps0, eps);
}

absl::StatusOr<double> Epsilon0ForTargetCase3(double eps, double gamma3_hat,
                                              double gamma2, double alpha,
                                              double eta, int k) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps, "eps"));
  PAR_RETURN_IF_ERROR(
      CheckUnitInterval(gamma3_hat, "gamma3_hat", /*allow_zero=*/false));
  PAR_RETURN_IF_ERROR(CheckUnitInterval(gamma2, "gamma2", /*allow_zero=*/false));
  PAR_RETURN_IF_ERROR(CheckUnitInterval(alpha, "alpha", /*allow_zero=*/false));
  PAR_RETURN_IF_ERROR(CheckPositive(eta, "eta"));
  if (gamma3_hat > alpha * gamma2) {
    return absl::NotFoundError(absl::StrCat(
        "empirical confidence ", gamma3_hat, " exceeds alpha * gamma2 = ",
        alpha * gamma2, "; no eps0 >= eps / eta attains it"));
  }
  PAR_ASSIGN_OR_RETURN(const LossDistribution dist, LossDistribution::Create(k));
  PAR_ASSIGN_OR_RETURN(const double mass_eps, dist.Cdf(eps));
  const double target = alpha * gamma2 * mass_eps / gamma3_hat;
  if (!(target < 1.0)) {
    return absl::NotFoundError(absl::StrCat(
        "required P(T <= eta eps0) = ", target, " is not below 1"));
  }
  PAR_ASSIGN_OR_RETURN(const double scaled, dist.Quantile(target));
  const double eps0 = std::max(scaled, eps) / eta;
  PAR_ASSIGN_OR_RETURN(const double mass_scaled, dist.Cdf(eta * eps0));
  const double residual = gamma3_hat * mass_scaled - alpha * gamma2 * mass_eps;
  if (std::abs(residual) > 1e-9) {
    return absl::InternalError(
        absl::StrCat("eps0 root residual ", residual, " exceeds 1e-9"));
  }
  return eps0;
}

absl::StatusOr<double> PdpDelta(double eps, double eps0, int k) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  if (eps > eps0) return 0.0;
  PAR_ASSIGN_OR_RETURN(const double gamma, Gamma1(eps, eps0, k));
  return 1.0 - gamma;
}

absl::StatusOr<MixtureGuarantee> MixGuarantees(const PrivacyAtRisk& first,
                                               const PrivacyAtRisk& second,
                                               double p) {
  PAR_RETURN_IF_ERROR(CheckUnitInterval(p, "mixing probability",
                                        /*allow_zero=*/true));
  PAR_RETURN_IF_ERROR(
      CheckUnitInterval(first.gamma, "gamma", /*allow_zero=*/true));
  PAR_RETURN_IF_ERROR(
      CheckUnitInterval(second.gamma, "gamma", /*allow_zero=*/true));
  const double w1 = p * first.gamma;
  const double w2 = (1.0 - p) * second.gamma;
  const double confidence = w1 + w2;
  if (!(confidence > 0.0)) {
    return absl::InvalidArgumentError(
        "mixture has zero confidence; its privacy level is undefined");
  }
  return MixtureGuarantee{
      .epsilon = (w1 * first.epsilon + w2 * second.epsilon) / confidence,
      .confidence = confidence,
      .violation_risk = 1.0 - confidence,
  };
}

}  // namespace par
