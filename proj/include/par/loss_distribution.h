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

// Distribution of the scaled privacy loss of a k-dimensional Laplace
// mechanism.
//
// If G1, G2 are i.i.d. Gamma(k, theta), then T = |G1 - G2| / theta has the
// density
//
//   p_T(t) = 2^{2-k} t^{k-1/2} K_{k-1/2}(t) / (sqrt(2 pi) Gamma(k)),  t > 0,
//
// which does not depend on theta. For a Laplace mechanism with noise scale
// theta = sensitivity / eps0, the privacy loss measured in units of eps0 is
// governed by T truncated to [0, eps0].
//
// With the half-integer Bessel closed form the density expands to
//
//   p_T(t) = 2^{1-k} / Gamma(k) e^{-t} sum_{i=0}^{k-1} a_i 2^{-i} t^{k-1-i},
//   a_i = (k-1+i)! / (i! (k-1-i)!),
//
// which is what Pdf() evaluates; k = 1 gives exactly e^{-t}.

#ifndef PAR_LOSS_DISTRIBUTION_H_
#define PAR_LOSS_DISTRIBUTION_H_

#include <vector>

#include "absl/status/statusor.h"
#include "par/special_functions.h"

namespace par {

class LossDistribution {
 public:
  // `dimension` is the query output dimension k >= 1.
  static absl::StatusOr<LossDistribution> Create(
      int dimension, const QuadratureConfig& quadrature = {});

  int dimension() const { return dimension_; }

  // Density at t > 0.
  absl::StatusOr<double> Pdf(double t) const;

  // P(T <= t) for t >= 0, by quadrature of the density.
  absl::StatusOr<double> Cdf(double t) const;

  // P(T <= min(eps, bound)) / P(T <= bound): the CDF of T conditioned on
  // T <= bound. Equals 1 for eps >= bound.
  absl::StatusOr<double> TruncatedRatio(double eps, double bound) const;

  // Smallest t with Cdf(t) = p, for p in [0, 1).
  absl::StatusOr<double> Quantile(double p) const;

  // Density evaluated without argument checks; continuous at t = 0.
  double DensityUnchecked(double t) const;

 private:
  LossDistribution(int dimension, std::vector<double> coefficients,
                   double tail_point, const QuadratureConfig& quadrature)
      : dimension_(dimension),
        coefficients_(std::move(coefficients)),
        tail_point_(tail_point),
        quadrature_(quadrature) {}

  int dimension_;
  // Density is e^{-t} * sum_j coefficients_[j] t^j.
  std::vector<double> coefficients_;
  // Beyond this point the density is below tolerance / 100.
  double tail_point_;
  QuadratureConfig quadrature_;
};

}  // namespace par

#endif  // PAR_LOSS_DISTRIBUTION_H_
