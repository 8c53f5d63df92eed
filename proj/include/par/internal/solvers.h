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

#ifndef PAR_INTERNAL_SOLVERS_H_
#define PAR_INTERNAL_SOLVERS_H_

#include <functional>
#include <optional>

#include "absl/status/statusor.h"

namespace par::internal {

struct RootOptions {
  double residual_tolerance = 1e-9;
  int max_iterations = 200;
};

// Root of a monotone function on a sign-changing bracket [lo, hi]. Bisection
// narrows the bracket; Newton steps (when `derivative` is given) are taken
// only when they land inside the current bracket. Stops once
// |f(x)| <= residual_tolerance and the bracket no longer changes meaningfully.
absl::StatusOr<double> SolveBracketed(
    const std::function<double(double)>& f, double lo, double hi,
    const std::optional<std::function<double(double)>>& derivative,
    const RootOptions& options = {});

// Minimizer of a unimodal function on [lo, hi] by golden-section search,
// narrowed to `width`.
double GoldenSectionMinimize(const std::function<double(double)>& f, double lo,
                             double hi, double width);

}  // namespace par::internal

#endif  // PAR_INTERNAL_SOLVERS_H_
