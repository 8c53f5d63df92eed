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


// Command-line front end. Subcommands: risk, sample-size, sensitivity,
// compose, budget, verify, rmse. JSON is the default output; curve-shaped
// results are CSV. Stochastic outputs carry their seed.

#ifndef PAR_CLI_H_
#define PAR_CLI_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "par/cost_model.h"
#include "par/montecarlo_oracle.h"
#include "par/risk_analysis.h"

namespace par {

inline constexpr int kExitOk = 0;
// Infeasible computation or failed verification.
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. The seed falls back to the PAR_SEED
// environment variable, then to 0.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Presentation rounding: probabilities to 6 significant digits, currency to
// cents.
double RoundSignificant(double value, int digits = 6);
double RoundCents(double value);

std::string RiskAssessmentToJson(const RiskAssessment& assessment);
absl::StatusOr<RiskAssessment> RiskAssessmentFromJson(const std::string& text);

std::string BudgetOptimumToJson(double eps0, const BudgetOptimum& optimum);
absl::StatusOr<BudgetOptimum> BudgetOptimumFromJson(const std::string& text);

// The oracle suite behind `verify`. `target` is one of gamma1, overlap,
// composition, cost or all.
absl::StatusOr<std::vector<ValidationReport>> RunVerification(
    const std::string& target, const McConfig& cfg);

}  // namespace par

#endif  // PAR_CLI_H_
