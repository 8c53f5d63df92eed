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


// Privacy accounting for n-fold composition of Laplace mechanisms.
//
// Besides basic and advanced composition, a mechanism that is eps0-DP and
// meets eps with confidence gamma composes to
//
//   eps' = eps0 sqrt(2 n ln(1/delta)) + n mu,
//   mu   = gamma eps (e^eps - 1) + (1 - gamma) eps0 (e^eps0 - 1),
//
// which is advanced composition when gamma = 0.

#ifndef PAR_COMPOSITION_H_
#define PAR_COMPOSITION_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace par {

absl::StatusOr<double> BasicComposition(double eps0, std::int64_t n);

absl::StatusOr<double> AdvancedComposition(double eps0, std::int64_t n,
                                           double delta);

absl::StatusOr<double> ParComposition(double eps0, double eps, double gamma,
                                      std::int64_t n, double delta);

struct LedgerEntry {
  double eps0;
  double eps;
  double gamma;
};

struct CompositionLedger {
  std::vector<LedgerEntry> entries;
  double delta = 1e-5;

  absl::Status Validate() const;
};

// Composes entries that may differ in eps0, eps and gamma:
//   sqrt(2 ln(1/delta) sum_i eps0_i^2) + sum_i mu_i.
// For identical entries this equals ParComposition.
absl::StatusOr<double> ComposeLedger(const CompositionLedger& ledger);

struct CompositionRow {
  std::int64_t n = 0;
  double basic = 0.0;
  double advanced = 0.0;
  double par = 0.0;
};

// One row for every n in [1, n_max]; the par column uses (eps, gamma).
absl::StatusOr<std::vector<CompositionRow>> CompareCompositions(
    double eps0, double delta, std::int64_t n_max, double eps, double gamma);

void WriteCompositionCsv(std::ostream& out,
                         const std::vector<CompositionRow>& rows);

}  // namespace par

#endif  // PAR_COMPOSITION_H_
