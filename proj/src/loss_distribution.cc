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

#include "par/loss_distribution.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "par/internal/solvers.h"
#include "par/internal/status_macros.h"

namespace par {

absl::StatusOr<LossDistribution> LossDistribution::Create(
    int dimension, const QuadratureConfig& quadrature) {
  if (dimension < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("query dimension must be at least 1, got ", dimension));
  }
  PAR_RETURN_IF_ERROR(quadrature.Validate());

  const int m = dimension - 1;
  PAR_ASSIGN_OR_RETURN(const double log_gamma_k, LogGamma(dimension));
  const double log_prefactor = (1 - dimension) * std::numbers::ln2 -
                               log_gamma_k;
  std::vector<double> coefficients(dimension, 0.0);
  double log_a = 0.0;  // ln a_0
  for (int i = 0; i <= m; ++i) {
    coefficients[m - i] = std::exp(log_prefactor + log_a - i * std::numbers::ln2);
    if (i < m) {
      log_a += std::log(static_cast<double>(m + i + 1)) +
               std::log(static_cast<double>(m - i)) -
               std::log(static_cast<double>(i + 1));
    }
  }

  LossDistribution dist(dimension, std::move(coefficients), 0.0, quadrature);
  // The density is unimodal around zero with an e^{-t} tail; walk out past
  // the mean (about sqrt(k)) until it drops under the truncation threshold.
  const double cutoff = quadrature.absolute_tolerance / 100.0;
  double tail = 1.0;
  while (dist.DensityUnchecked(tail) >= cutoff) tail *= 1.5;
  dist.tail_point_ = tail;
  return dist;
}

double LossDistribution::DensityUnchecked(double t) const {
  double poly = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    poly = poly * t + *it;
  }
  return std::exp(-t) * poly;
}

absl::StatusOr<double> LossDistribution::Pdf(double t) const {
  if (!(t > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("loss density is defined for t > 0, got ", t));
  }
  return DensityUnchecked(t);
}

absl::StatusOr<double> LossDistribution::Cdf(double t) const {
  if (!(t >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("loss CDF requires t >= 0, got ", t));
  }
  if (t == 0.0) return 0.0;
  const double upper = std::min(t, tail_point_);
  PAR_ASSIGN_OR_RETURN(
      const double mass,
      Integrate([this](double s) { return DensityUnchecked(s); }, 0.0, upper,
                quadrature_));
  return std::clamp(mass, 0.0, 1.0);
}

absl::StatusOr<double> LossDistribution::TruncatedRatio(double eps,
                                                        double bound) const {
  if (!(bound > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("truncation bound must be positive, got ", bound));
  }
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("privacy level must be non-negative, got ", eps));
  }
  if (eps >= bound) return 1.0;
  PAR_ASSIGN_OR_RETURN(const double numerator, Cdf(eps));
  PAR_ASSIGN_OR_RETURN(const double denominator, Cdf(bound));
  if (denominator <= 0.0) {
    return absl::OutOfRangeError(
        absl::StrCat("P(T <= ", bound, ") underflows"));
  }
  return std::clamp(numerator / denominator, 0.0, 1.0);
}

absl::StatusOr<double> LossDistribution::Quantile(double p) const {
  if (!(p >= 0.0) || !(p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile level must lie in [0, 1), got ", p));
  }
  if (p == 0.0) return 0.0;
  absl::Status failure = absl::OkStatus();
  auto excess = [&](double t) {
    absl::StatusOr<double> c = Cdf(t);
    if (!c.ok()) {
      failure.Update(c.status());
      return 0.0;
    }
    return *c - p;
  };
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 4 * tail_point_) {
      return absl::OutOfRangeError(
          absl::StrCat("quantile level ", p, " is beyond the CDF resolution"));
    }
  }
  PAR_RETURN_IF_ERROR(failure);
  internal::RootOptions options;
  options.residual_tolerance = 1e-13;
  absl::StatusOr<double> root = internal::SolveBracketed(
      excess, 0.0, hi,
      std::function<double(double)>(
          [this](double t) { return DensityUnchecked(t); }),
      options);
  PAR_RETURN_IF_ERROR(failure);
  return root;
}

}  // namespace par
