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


// Compensation-budget model for personal-data breaches.
//
// Releasing with privacy level eps costs E_min + E e^{-c / eps} per person.
// An eps0-DP Laplace mechanism that meets eps < eps0 with confidence gamma
// is priced as the mixture
//
//   gamma * cost(eps) + (1 - gamma) * cost(eps0),
//
// which is convex in eps and has a unique minimizer eps_min in (0, eps0].

#ifndef PAR_COST_MODEL_H_
#define PAR_COST_MODEL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace par {

struct CostModelParams {
  // Per-person compensation without any privacy guarantee.
  double E = 0.0;
  double E_min = 0.0;
  double c = 1.0;
  std::int64_t N = 1;

  absl::Status Validate() const;
};

// Confidence with which level eps holds; by default gamma1(eps; eps0, k).
using ConfidenceFn = std::function<absl::StatusOr<double>(double eps)>;

// E_min + E e^{-c / eps}, per person.
absl::StatusOr<double> DpCost(double eps, const CostModelParams& params);

// Per-person mixture cost for 0 < eps <= eps0.
absl::StatusOr<double> ParCost(double eps, double eps0,
                               const CostModelParams& params, int k,
                               const ConfidenceFn& confidence = nullptr);

// N * ParCost.
absl::StatusOr<double> Budget(double eps, double eps0,
                              const CostModelParams& params, int k,
                              const ConfidenceFn& confidence = nullptr);

// N * DpCost: the budget without privacy at risk.
absl::StatusOr<double> DpBudget(double eps, const CostModelParams& params);

// Minimizer of ParCost over (0, eps0], by golden-section search to an
// interval width of 1e-6. Returns eps0 when the minimum sits at the boundary.
absl::StatusOr<double> EpsilonMin(double eps0, const CostModelParams& params,
                                  int k,
                                  const ConfidenceFn& confidence = nullptr);

// Stationary point of the k = 1, c = 1, E_min = 0 model, from
//   1/eps - ln(1 - (1 - e^eps) / eps^2) = 1/eps0
// by safeguarded Newton. Cross-check for EpsilonMin.
absl::StatusOr<double> EpsilonMinStationary(double eps0);

struct BudgetOptimum {
  double eps_min = 0.0;
  double gamma = 0.0;
  double budget = 0.0;
  double dp_budget = 0.0;
  double saving = 0.0;
};

absl::StatusOr<BudgetOptimum> OptimizeBudget(double eps0,
                                             const CostModelParams& params,
                                             int k);

struct EpsilonInterval {
  // sensitivity / max_mae.
  double lower = 0.0;
  // Largest eps whose mixture cost at fixed gamma stays within the
  // per-person budget; nullopt when every eps fits.
  std::optional<double> upper;
  bool feasible = false;
};

// Range of eps allowed by an error cap and a per-person budget at fixed
// confidence gamma:
//   sensitivity / max_mae <= eps <= c / ln(gamma E / (B - (1-gamma) cost(eps0)
//                                               - gamma E_min)).
// When the budget cannot even cover the (1 - gamma) share, upper is 0.
absl::StatusOr<EpsilonInterval> EpsilonBounds(double max_mae,
                                              double budget_per_person,
                                              double gamma, double eps0,
                                              const CostModelParams& params,
                                              double sensitivity = 1.0);

// Smallest second difference of ParCost on `points` equally spaced levels in
// (0, eps0]; non-negative up to rounding for a convex cost.
absl::StatusOr<double> MinSecondDifference(double eps0,
                                           const CostModelParams& params,
                                           int k, int points = 200);

struct BudgetCurvePoint {
  double eps = 0.0;
  double gamma = 0.0;
  double budget = 0.0;
};

// Budget at `points` equally spaced levels in (0, eps0].
absl::StatusOr<std::vector<BudgetCurvePoint>> BudgetCurve(
    double eps0, const CostModelParams& params, int k, int points);

void WriteBudgetCurveCsv(std::ostream& out,
                         const std::vector<BudgetCurvePoint>& curve);

}  // namespace par

#endif  // PAR_COST_MODEL_H_
