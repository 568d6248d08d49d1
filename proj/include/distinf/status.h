// Copyright 2026 The distinf Authors
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

#ifndef DISTINF_STATUS_H_
#define DISTINF_STATUS_H_

#include <optional>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"

namespace distinf {

// Domain-level error categories. Every error returned by the library carries
// one of these as a status payload, so callers and tests can branch on the
// precise failure rather than on the coarse absl code.
enum class ErrorKind {
  kEqualRatios,
  kOmegaOutOfRange,
  kDegenerateAlpha,
  kNonpositiveError,
  kUnorderedSpecs,
  kZeroDenominator,
  kTooLarge,
  kLengthMismatch,
  kIncompatibleArch,
  kShapeMismatch,
  kNumericalDivergence,
  kBadLayerIndex,
  kMalformedDocument,
  kMissingLabel,
  kArchMismatch,
  kConfigError,
  kUnknownAttack,
  kInvalidArgument,
};

absl::string_view ErrorKindName(ErrorKind kind);

// Builds a status whose message is prefixed with the kind name.
absl::Status MakeError(ErrorKind kind, absl::string_view message);

// Returns the kind attached by MakeError, or nullopt for OK / foreign errors.
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

inline bool HasErrorKind(const absl::Status& status, ErrorKind kind) {
  return GetErrorKind(status) == kind;
}

}  // namespace distinf

#define DISTINF_RETURN_IF_ERROR(expr)          \
  do {                                         \
    const absl::Status _distinf_st = (expr);   \
    if (!_distinf_st.ok()) return _distinf_st; \
  } while (0)

#define DISTINF_CONCAT_INNER_(a, b) a##b
#define DISTINF_CONCAT_(a, b) DISTINF_CONCAT_INNER_(a, b)

#define DISTINF_ASSIGN_OR_RETURN(lhs, rexpr) \
  DISTINF_ASSIGN_OR_RETURN_IMPL_(            \
      DISTINF_CONCAT_(_distinf_statusor, __LINE__), lhs, rexpr)

#define DISTINF_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                   \
  if (!statusor.ok()) return statusor.status();              \
  lhs = std::move(statusor).value()

#endif  // DISTINF_STATUS_H_
