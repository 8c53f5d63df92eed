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


#include "par/cost_model.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "absl/strings/str_cat.h"
#include "par/internal/solvers.h"
#include "par/internal/status_macros.h"
#include "par/risk_analysis.h"

namespace par {
namespace {

absl::Status CheckEps0(double eps0) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps0 must be positive, got ", eps0));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Confidence(double eps, double eps0, int k,
                                  const ConfidenceFn& confidence) {
  if (confidence) {
    PAR_ASSIGN_OR_RETURN(const double gamma, confidence(eps));
    if (!(gamma >= 0.0) || !(gamma <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "confidence function returned ", gamma, " outside [0, 1]"));
    }
    return gamma;
  }
  return Gamma1(eps, eps0, k);
}

}  // namespace

absl::Status CostModelParams::Validate() const {
  if (!(E_min >= 0.0) || !std::isfinite(E_min)) {
    return absl::InvalidArgumentError(
        absl::StrCat("E_min must be non-negative, got ", E_min));
  }
  if (!(E > E_min) || !std::isfinite(E)) {
    return absl::InvalidArgumentError(
        absl::StrCat("E must exceed E_min, got E=", E, ", E_min=", E_min));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rate c must be positive, got ", c));
  }
  if (N < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("population N must be positive, got ", N));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> DpCost(double eps, const CostModelParams& params) {
  PAR_RETURN_IF_ERROR(params.Validate());
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("privacy level must be positive, got ", eps));
  }
  return params.E_min + params.E * std::exp(-params.c / eps);
}

absl::StatusOr<double> ParCost(double eps, double eps0,
                               const CostModelParams& params, int k,
                               const ConfidenceFn& confidence) {
  PAR_RETURN_IF_ERROR(CheckEps0(eps0));
  if (!(eps > 0.0) || eps > eps0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "privacy level must lie in (0, eps0] = (0, ", eps0, "], got ", eps));
  }
  PAR_ASSIGN_OR_RETURN(const double cost_eps, DpCost(eps, params));
  PAR_ASSIGN_OR_RETURN(const double cost_eps0, DpCost(eps0, params));
  PAR_ASSIGN_OR_RETURN(const double gamma,
                       Confidence(eps, eps0, k, confidence));
  return gamma * cost_eps + (1.0 - gamma) * cost_eps0;
}

absl::StatusOr<double> Budget(double eps, double eps0,
                              const CostModelParams& params, int k,
                              const ConfidenceFn& confidence) {
  PAR_ASSIGN_OR_RETURN(const double per_person,
                       ParCost(eps, eps0, params, k, confidence));
  return static_cast<double>(params.N) * per_person;
}

absl::StatusOr<double> DpBudget(double eps, const CostModelParams& params) {
  PAR_ASSIGN_OR_RETURN(const double per_person, DpCost(eps, params));
  return static_cast<double>(params.N) * per_person;
}

absl::StatusOr<double> EpsilonMin(double eps0, const CostModelParams& params,
                                  int k, const ConfidenceFn& confidence) {
  PAR_RETURN_IF_ERROR(CheckEps0(eps0));
  PAR_RETURN_IF_ERROR(params.Validate());
  absl::Status failure = absl::OkStatus();
  auto objective = [&](double eps) {
    absl::StatusOr<double> cost = ParCost(eps, eps0, params, k, confidence);
    if (!cost.ok()) {
      failure.Update(cost.status());
      return std::numeric_limits<double>::infinity();
    }
    return *cost;
  };
  constexpr double kWidth = 1e-6;
  const double lo = std::min(kWidth, eps0) * 1e-3;
  const double eps_min =
      internal::GoldenSectionMinimize(objective, lo, eps0, kWidth);
  PAR_RETURN_IF_ERROR(failure);
  // Golden section never probes eps0 itself; prefer it on ties, which
  // covers a flat cost curve.
  if (objective(eps0) <= objective(eps_min)) return eps0;
  PAR_RETURN_IF_ERROR(failure);
  return eps_min;
}

absl::StatusOr<double> EpsilonMinStationary(double eps0) {
  PAR_RETURN_IF_ERROR(CheckEps0(eps0));
  // g(eps) = 1/eps - ln(h(eps)) - 1/eps0 with h = 1 + (e^eps - 1) / eps^2.
  auto h = [](double e) { return 1.0 + std::expm1(e) / (e * e); };
  auto g = [&](double e) { return 1.0 / e - std::log(h(e)) - 1.0 / eps0; };
  auto dg = [&](double e) {
    const double dh = std::exp(e) / (e * e) - 2.0 * std::expm1(e) / (e * e * e);
    return -1.0 / (e * e) - dh / h(e);
  };
  // g -> +inf as eps -> 0 and g(eps0) = -ln h(eps0) < 0.
  double lo = 0.5 * eps0;
  while (g(lo) <= 0.0) {
    lo *= 0.5;
    if (lo < 1e-12) {
      return absl::NotFoundError("stationarity equation has no bracket");
    }
  }
  return internal::SolveBracketed(g, lo, eps0,
                                  std::function<double(double)>(dg),
                                  {.residual_tolerance = 1e-12});
}

absl::StatusOr<BudgetOptimum> OptimizeBudget(double eps0,
                                             const CostModelParams& params,
                                             int k) {
  BudgetOptimum out;
  PAR_ASSIGN_OR_RETURN(out.eps_min, EpsilonMin(eps0, params, k));
  PAR_ASSIGN_OR_RETURN(out.gamma, Gamma1(out.eps_min, eps0, k));
  PAR_ASSIGN_OR_RETURN(out.budget, Budget(out.eps_min, eps0, params, k));
  PAR_ASSIGN_OR_RETURN(out.dp_budget, DpBudget(eps0, params));
  out.saving = out.dp_budget - out.budget;
  return out;
}

absl::StatusOr<EpsilonInterval> EpsilonBounds(double max_mae,
                                              double budget_per_person,
                                              double gamma, double eps0,
                                              const CostModelParams& params,
                                              double sensitivity) {
  PAR_RETURN_IF_ERROR(CheckEps0(eps0));
  if (!(max_mae > 0.0) || !(sensitivity > 0.0)) {
    return absl::InvalidArgumentError(
        "maximum error and sensitivity must be positive");
  }
  if (!(gamma > 0.0) || !(gamma <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0, 1], got ", gamma));
  }
  if (!(budget_per_person > 0.0) || !std::isfinite(budget_per_person)) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget must be positive, got ", budget_per_person));
  }
  PAR_ASSIGN_OR_RETURN(const double cost_eps0, DpCost(eps0, params));

  EpsilonInterval interval;
  interval.lower = sensitivity / max_mae;
  const double room =
      budget_per_person - (1.0 - gamma) * cost_eps0 - gamma * params.E_min;
  if (room <= 0.0) {
    interval.upper = 0.0;
  } else {
    const double log_arg = gamma * params.E / room;
    if (log_arg > 1.0) interval.upper = params.c / std::log(log_arg);
  }
  interval.feasible =
      !interval.upper.has_value() || interval.lower <= *interval.upper;
  return interval;
}

absl::StatusOr<double> MinSecondDifference(double eps0,
                                           const CostModelParams& params,
                                           int k, int points) {
  if (points < 3) {
    return absl::InvalidArgumentError("need at least three grid points");
  }
  std::vector<double> cost(points);
  for (int i = 0; i < points; ++i) {
    PAR_ASSIGN_OR_RETURN(cost[i],
                         ParCost(eps0 * (i + 1) / points, eps0, params, k));
  }
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < points; ++i) {
    smallest = std::min(smallest, cost[i - 1] - 2.0 * cost[i] + cost[i + 1]);
  }
  return smallest;
}

absl::StatusOr<std::vector<BudgetCurvePoint>> BudgetCurve(
    double eps0, const CostModelParams& params, int k, int points) {
  if (points < 1) {
    return absl::InvalidArgumentError("need at least one curve point");
  }
  std::vector<BudgetCurvePoint> curve;
  curve.reserve(points);
  for (int i = 1; i <= points; ++i) {
    BudgetCurvePoint p;
    p.eps = eps0 * i / points;
    PAR_ASSIGN_OR_RETURN(p.gamma, Gamma1(p.eps, eps0, k));
    PAR_ASSIGN_OR_RETURN(p.budget, Budget(p.eps, eps0, params, k));
    curve.push_back(p);
  }
  return curve;
}

void WriteBudgetCurveCsv(std::ostream& out,
                         const std::vector<BudgetCurvePoint>& curve) {
  out << "eps,gamma,budget\n";
  for (const BudgetCurvePoint& p : curve) {
    out << std::setprecision(17) << p.eps << ',' << std::setprecision(6)
        << p.gamma << ',' << std::fixed << std::setprecision(2) << p.budget
        << std::defaultfloat << '\n';
  }
}

}  // namespace par
