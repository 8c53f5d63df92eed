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

#include "par/internal/solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace par::internal {

absl::StatusOr<double> SolveBracketed(
    const std::function<double(double)>& f, double lo, double hi,
    const std::optional<std::function<double(double)>>& derivative,
    const RootOptions& options) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (std::abs(f_lo) <= options.residual_tolerance) return lo;
  if (std::abs(f_hi) <= options.residual_tolerance) return hi;
  if ((f_lo > 0) == (f_hi > 0)) {
    return absl::NotFoundError(absl::StrCat("no sign change on [", lo, ", ",
                                            hi, "]: f(lo)=", f_lo,
                                            ", f(hi)=", f_hi));
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (f_lo > 0)) {
      lo = x;
    } else {
      hi = x;
    }
    double next = 0.5 * (lo + hi);
    bool settled = !derivative.has_value();
    if (derivative.has_value()) {
      const double newton = x - fx / (*derivative)(x);
      if (std::isfinite(newton)) {
        settled = std::abs(newton - x) <= 1e-14 * std::max(1.0, std::abs(x));
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (std::abs(fx) <= options.residual_tolerance && settled) return x;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(x))) {
      break;
    }
    x = next;
  }
  const double fx = f(x);
  if (std::abs(fx) <= options.residual_tolerance) return x;
  return absl::ResourceExhaustedError(absl::StrCat(
      "root finder exhausted ", options.max_iterations,
      " iterations; residual ", fx));
}

double GoldenSectionMinimize(const std::function<double(double)>& f, double lo,
                             double hi, double width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > width) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace par::internal
