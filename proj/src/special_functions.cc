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

#include "par/special_functions.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "absl/strings/str_cat.h"
#include "boost/math/quadrature/gauss.hpp"
#include "boost/math/quadrature/gauss_kronrod.hpp"
#include "boost/math/special_functions/gamma.hpp"

namespace par {
namespace {

using Kronrod15 = boost::math::quadrature::gauss_kronrod<double, 15>;

absl::Status CheckBesselDomain(int order_index, double t) {
  if (order_index < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bessel order index must be non-negative, got ",
                     order_index));
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Bessel argument must be positive and finite, got ", t));
  }
  return absl::OkStatus();
}

// ln sum_{i=0}^{m} (m+i)!/(i!(m-i)!) (2t)^{-i}, accumulated relative to the
// largest term so that neither end of the t range overflows.
double LogFiniteSum(int m, double t) {
  const double log_inv_2t = -std::log(2.0 * t);
  std::vector<double> log_terms(m + 1);
  double log_coeff = 0.0;  // ln a_0 = ln 1
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= m; ++i) {
    log_terms[i] = log_coeff + i * log_inv_2t;
    max_log = std::max(max_log, log_terms[i]);
    // a_{i+1} = a_i (m+i+1)(m-i)/(i+1)
    if (i < m) {
      log_coeff += std::log(static_cast<double>(m + i + 1)) +
                   std::log(static_cast<double>(m - i)) -
                   std::log(static_cast<double>(i + 1));
    }
  }
  double scaled = 0.0;
  for (double lt : log_terms) scaled += std::exp(lt - max_log);
  return max_log + std::log(scaled);
}

struct Segment {
  double a;
  double b;
  double value;
  double error;
  int depth;

  bool operator<(const Segment& other) const { return error < other.error; }
};

// One 15-point Kronrod / 7-point Gauss panel on [a, b], with the QUADPACK
// (QK15) error estimate. Node and weight tables come from Boost.Math.
Segment Evaluate(const std::function<double(double)>& f, double a, double b,
                 int depth) {
  using Gauss7 = boost::math::quadrature::gauss<double, 7>;
  const auto& nodes = Kronrod15::abscissa();
  const auto& kronrod_weights = Kronrod15::weights();
  const auto& gauss_weights = Gauss7::weights();

  const double center = 0.5 * (a + b);
  const double half_length = 0.5 * (b - a);
  std::array<double, 15> values{};
  values[0] = f(center);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    values[2 * i - 1] = f(center + half_length * nodes[i]);
    values[2 * i] = f(center - half_length * nodes[i]);
  }

  double kronrod = values[0] * kronrod_weights[0];
  double gauss = values[0] * gauss_weights[0];
  double absolute = std::abs(kronrod);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double pair = values[2 * i - 1] + values[2 * i];
    kronrod += pair * kronrod_weights[i];
    absolute += (std::abs(values[2 * i - 1]) + std::abs(values[2 * i])) *
                kronrod_weights[i];
    // Gauss nodes sit at the even-indexed Kronrod abscissae.
    if (i % 2 == 0) gauss += pair * gauss_weights[i / 2];
  }
  const double mean = 0.5 * kronrod;
  double spread = kronrod_weights[0] * std::abs(values[0] - mean);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    spread += kronrod_weights[i] * (std::abs(values[2 * i - 1] - mean) +
                                    std::abs(values[2 * i] - mean));
  }

  const double scale = std::abs(half_length);
  double error = std::abs((kronrod - gauss) * half_length);
  spread *= scale;
  absolute *= scale;
  if (spread != 0.0 && error != 0.0) {
    error = spread * std::min(1.0, std::pow(200.0 * error / spread, 1.5));
  }
  constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
  error = std::max(error, 50.0 * kEpsilon * absolute);
  return {a, b, kronrod * half_length, error, depth};
}

}  // namespace

absl::StatusOr<double> LogGamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    return absl::InvalidArgumentError(
        absl::StrCat("LogGamma requires a positive finite argument, got ", x));
  }
  return boost::math::lgamma(x);
}

absl::StatusOr<double> LogBesselKHalf(int order_index, double t) {
  if (absl::Status s = CheckBesselDomain(order_index, t); !s.ok()) return s;
  return 0.5 * std::log(std::numbers::pi / (2.0 * t)) - t +
         LogFiniteSum(order_index, t);
}

absl::StatusOr<double> BesselKHalf(int order_index, double t) {
  absl::StatusOr<double> log_k = LogBesselKHalf(order_index, t);
  if (!log_k.ok()) return log_k.status();
  const double value = std::exp(*log_k);
  if (!std::isfinite(value)) {
    return absl::OutOfRangeError(absl::StrCat(
        "K_{", order_index, "+1/2}(", t, ") overflows a double"));
  }
  if (value == 0.0 || !std::isnormal(value)) {
    return absl::OutOfRangeError(absl::StrCat(
        "K_{", order_index, "+1/2}(", t, ") underflows a double"));
  }
  return value;
}

absl::Status QuadratureConfig::Validate() const {
  if (!(absolute_tolerance > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("absolute tolerance must be positive, got ",
                     absolute_tolerance));
  }
  if (max_subdivisions < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max subdivisions must be at least 1, got ", max_subdivisions));
  }
  return absl::OkStatus();
}

namespace {

// Globally adaptive: always bisect the segment with the largest error
// estimate until the summed estimate meets the tolerance.
absl::StatusOr<double> AdaptiveKronrod(const std::function<double(double)>& f,
                                       double a, double b,
                                       const QuadratureConfig& cfg) {
  std::priority_queue<Segment> open;
  std::vector<Segment> frozen;  // segments at the depth limit
  open.push(Evaluate(f, a, b, 0));
  double total_error = open.top().error;
  constexpr int kMaxSegments = 1 << 12;
  int segments = 1;

  while (total_error > cfg.absolute_tolerance && !open.empty() &&
         segments < kMaxSegments) {
    Segment worst = open.top();
    open.pop();
    if (worst.depth >= cfg.max_subdivisions) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = Evaluate(f, worst.a, mid, worst.depth + 1);
    Segment right = Evaluate(f, mid, worst.b, worst.depth + 1);
    total_error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
    ++segments;
  }

  double value = 0.0;
  double error = 0.0;
  for (const Segment& s : frozen) {
    value += s.value;
    error += s.error;
  }
  while (!open.empty()) {
    value += open.top().value;
    error += open.top().error;
    open.pop();
  }
  if (!std::isfinite(value)) {
    return absl::InvalidArgumentError(
        "integrand produced a non-finite value inside the interval");
  }
  if (error > cfg.absolute_tolerance) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "quadrature did not converge: error estimate ", error,
        " exceeds tolerance ", cfg.absolute_tolerance, " after ", segments,
        " segments"));
  }
  return value;
}

}  // namespace

absl::StatusOr<double> Integrate(const std::function<double(double)>& f,
                                 double a, double b,
                                 const QuadratureConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
    return absl::InvalidArgumentError(absl::StrCat(
        "integration bounds must be finite with a <= b, got [", a, ", ", b,
        "]"));
  }
  if (a == b) return 0.0;

  absl::StatusOr<double> direct = AdaptiveKronrod(f, a, b, cfg);
  if (direct.ok() || !absl::IsResourceExhausted(direct.status())) {
    return direct;
  }
  // Bisection error estimates stay pessimistic near a singularity at `a`.
  // Substituting x = a + (b - a) u^2 cancels an (x - a)^{-1/2} blow-up and
  // weakens stronger ones.
  const double width = b - a;
  auto substituted = [&](double u) {
    return f(a + width * u * u) * 2.0 * width * u;
  };
  absl::StatusOr<double> retry = AdaptiveKronrod(substituted, 0.0, 1.0, cfg);
  if (retry.ok()) return retry;
  return direct;
}

absl::StatusOr<double> IntegrateToInfinity(
    const std::function<double(double)>& f, double a,
    const QuadratureConfig& cfg) {
  if (absl::Status s = cfg.Validate(); !s.ok()) return s;
  if (!std::isfinite(a)) {
    return absl::InvalidArgumentError("lower bound must be finite");
  }
  const double cutoff = cfg.absolute_tolerance / 100.0;
  double width = 1.0;
  double upper = a + width;
  constexpr double kMaxWidth = 1e6;
  while (std::abs(f(upper)) >= cutoff) {
    width *= 2.0;
    if (width > kMaxWidth) {
      return absl::ResourceExhaustedError(
          "integrand does not decay below the truncation threshold");
    }
    upper = a + width;
  }
  return Integrate(f, a, upper, cfg);
}

}  // namespace par
