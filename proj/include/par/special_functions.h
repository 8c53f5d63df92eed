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

// Special functions and quadrature used by the loss distribution.

#ifndef PAR_SPECIAL_FUNCTIONS_H_
#define PAR_SPECIAL_FUNCTIONS_H_

#include <functional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace par {

// ln Gamma(x) for x > 0. Returns InvalidArgument for x <= 0.
absl::StatusOr<double> LogGamma(double x);

// Modified Bessel function of the second kind at half-integer order,
// K_{m+1/2}(t), evaluated with the exact finite sum
//
//   K_{m+1/2}(t) = sqrt(pi / (2t)) e^{-t} sum_{i=0}^{m} (m+i)! / (i! (m-i)!)
//                  (2t)^{-i}.
//
// Returns InvalidArgument for t <= 0 or m < 0. Returns OutOfRange when the
// value is not representable as a positive double: for small t the leading
// term (2m)!/m! (2t)^{-m} overflows (for m = 10 this starts near t = 1e-30),
// and for t above ~745 the e^{-t} factor underflows. LogBesselKHalf covers
// both regimes.
absl::StatusOr<double> BesselKHalf(int order_index, double t);

// ln K_{m+1/2}(t). Same domain checks as BesselKHalf, but never overflows.
absl::StatusOr<double> LogBesselKHalf(int order_index, double t);

struct QuadratureConfig {
  double absolute_tolerance = 1e-10;
  // Maximum bisection depth of any subinterval.
  int max_subdivisions = 60;

  absl::Status Validate() const;
};

// Integral of `f` over [a, b] by globally adaptive 15-point Gauss-Kronrod
// quadrature. The rule never evaluates the endpoints, so integrable endpoint
// singularities are permitted. Returns ResourceExhausted when the error
// estimate cannot be brought under `cfg.absolute_tolerance` within the
// subdivision budget.
absl::StatusOr<double> Integrate(const std::function<double(double)>& f,
                                 double a, double b,
                                 const QuadratureConfig& cfg = {});

// Integral of `f` over [a, inf) for integrands with an exponentially decaying
// envelope. The range is truncated at the first doubling point where
// |f| < tolerance / 100.
absl::StatusOr<double> IntegrateToInfinity(
    const std::function<double(double)>& f, double a,
    const QuadratureConfig& cfg = {});

}  // namespace par

#endif  // PAR_SPECIAL_FUNCTIONS_H_
