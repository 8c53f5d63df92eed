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

#ifndef PAR_INTERNAL_STATUS_MACROS_H_
#define PAR_INTERNAL_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define PAR_STATUS_CONCAT_INNER_(x, y) x##y
#define PAR_STATUS_CONCAT_(x, y) PAR_STATUS_CONCAT_INNER_(x, y)

// Returns early from the enclosing function if `expr` is not OK.
#define PAR_RETURN_IF_ERROR(expr)                  \
  do {                                             \
    const absl::Status par_status_ = (expr);       \
    if (!par_status_.ok()) return par_status_;     \
  } while (0)

// Evaluates a StatusOr expression, returning its status on error and moving
// the value into `lhs` otherwise.
#define PAR_ASSIGN_OR_RETURN(lhs, rexpr)                                  \
  PAR_ASSIGN_OR_RETURN_IMPL_(PAR_STATUS_CONCAT_(par_statusor_, __LINE__), \
                             lhs, rexpr)

#define PAR_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                               \
  if (!statusor.ok()) return statusor.status();          \
  lhs = std::move(statusor).value()

#endif  // PAR_INTERNAL_STATUS_MACROS_H_
