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


#include "par/composition.h"

#include <cmath>
#include <iomanip>

#include "absl/strings/str_cat.h"
#include "par/internal/status_macros.h"

namespace par {
namespace {

absl::Status CheckCommon(double eps0, std::int64_t n) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps0 must be positive, got ", eps0));
  }
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("composition count must be positive, got ", n));
  }
  return absl::OkStatus();
}

absl::Status CheckDelta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

absl::Status CheckEntry(const LedgerEntry& e) {
  PAR_RETURN_IF_ERROR(CheckCommon(e.eps0, 1));
  if (!(e.eps >= 0.0) || e.eps > e.eps0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "eps must lie in [0, eps0] = [0, ", e.eps0, "], got ", e.eps));
  }
  if (!(e.gamma >= 0.0) || !(e.gamma <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in [0, 1], got ", e.gamma));
  }
  return absl::OkStatus();
}

// Expected privacy loss of one mechanism, simulated as an eps-DP mechanism
// with probability gamma and an eps0-DP one otherwise.
double MeanLoss(const LedgerEntry& e) {
  return e.gamma * e.eps * std::expm1(e.eps) +
         (1.0 - e.gamma) * e.eps0 * std::expm1(e.eps0);
}

}  // namespace

absl::StatusOr<double> BasicComposition(double eps0, std::int64_t n) {
  PAR_RETURN_IF_ERROR(CheckCommon(eps0, n));
  return static_cast<double>(n) * eps0;
}

absl::StatusOr<double> AdvancedComposition(double eps0, std::int64_t n,
                                           double delta) {
  PAR_RETURN_IF_ERROR(CheckCommon(eps0, n));
  PAR_RETURN_IF_ERROR(CheckDelta(delta));
  const auto nd = static_cast<double>(n);
  return eps0 * std::sqrt(2.0 * nd * std::log(1.0 / delta)) +
         nd * eps0 * std::expm1(eps0);
}

absl::StatusOr<double> ParComposition(double eps0, double eps, double gamma,
                                      std::int64_t n, double delta) {
  const LedgerEntry entry{eps0, eps, gamma};
  PAR_RETURN_IF_ERROR(CheckEntry(entry));
  PAR_RETURN_IF_ERROR(CheckCommon(eps0, n));
  PAR_RETURN_IF_ERROR(CheckDelta(delta));
  const auto nd = static_cast<double>(n);
  return eps0 * std::sqrt(2.0 * nd * std::log(1.0 / delta)) +
         nd * MeanLoss(entry);
}

absl::Status CompositionLedger::Validate() const {
  if (entries.empty()) {
    return absl::InvalidArgumentError("composition ledger is empty");
  }
  PAR_RETURN_IF_ERROR(CheckDelta(delta));
  for (const LedgerEntry& e : entries) PAR_RETURN_IF_ERROR(CheckEntry(e));
  return absl::OkStatus();
}

absl::StatusOr<double> ComposeLedger(const CompositionLedger& ledger) {
  PAR_RETURN_IF_ERROR(ledger.Validate());
  double sum_sq = 0.0;
  double sum_mu = 0.0;
  for (const LedgerEntry& e : ledger.entries) {
    sum_sq += e.eps0 * e.eps0;
    sum_mu += MeanLoss(e);
  }
  return std::sqrt(2.0 * std::log(1.0 / ledger.delta) * sum_sq) + sum_mu;
}

absl::StatusOr<std::vector<CompositionRow>> CompareCompositions(
    double eps0, double delta, std::int64_t n_max, double eps, double gamma) {
  PAR_RETURN_IF_ERROR(CheckCommon(eps0, n_max));
  std::vector<CompositionRow> rows;
  rows.reserve(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    CompositionRow row{.n = n};
    PAR_ASSIGN_OR_RETURN(row.basic, BasicComposition(eps0, n));
    PAR_ASSIGN_OR_RETURN(row.advanced, AdvancedComposition(eps0, n, delta));
    PAR_ASSIGN_OR_RETURN(row.par, ParComposition(eps0, eps, gamma, n, delta));
    rows.push_back(row);
  }
  return rows;
}

void WriteCompositionCsv(std::ostream& out,
                         const std::vector<CompositionRow>& rows) {
  out << "n,basic,advanced,par\n" << std::setprecision(17);
  for (const CompositionRow& r : rows) {
    out << r.n << ',' << r.basic << ',' << r.advanced << ',' << r.par << '\n';
  }
}

}  // namespace par
