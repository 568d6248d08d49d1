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

#include "distinf/status.h"

#include <array>
#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace distinf {
namespace {

constexpr absl::string_view kPayloadUrl = "type.distinf/error_kind";

constexpr std::array<std::pair<ErrorKind, absl::string_view>, 18> kNames = {{
    {ErrorKind::kEqualRatios, "EqualRatios"},
    {ErrorKind::kOmegaOutOfRange, "OmegaOutOfRange"},
    {ErrorKind::kDegenerateAlpha, "DegenerateAlpha"},
    {ErrorKind::kNonpositiveError, "NonpositiveError"},
    {ErrorKind::kUnorderedSpecs, "UnorderedSpecs"},
    {ErrorKind::kZeroDenominator, "ZeroDenominator"},
    {ErrorKind::kTooLarge, "TooLarge"},
    {ErrorKind::kLengthMismatch, "LengthMismatch"},
    {ErrorKind::kIncompatibleArch, "IncompatibleArch"},
    {ErrorKind::kShapeMismatch, "ShapeMismatch"},
    {ErrorKind::kNumericalDivergence, "NumericalDivergence"},
    {ErrorKind::kBadLayerIndex, "BadLayerIndex"},
    {ErrorKind::kMalformedDocument, "MalformedDocument"},
    {ErrorKind::kMissingLabel, "MissingLabel"},
    {ErrorKind::kArchMismatch, "ArchMismatch"},
    {ErrorKind::kConfigError, "ConfigError"},
    {ErrorKind::kUnknownAttack, "UnknownAttack"},
    {ErrorKind::kInvalidArgument, "InvalidArgument"},
}};

absl::StatusCode CodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTooLarge:
      return absl::StatusCode::kOutOfRange;
    case ErrorKind::kNumericalDivergence:
      return absl::StatusCode::kInternal;
    case ErrorKind::kMalformedDocument:
      return absl::StatusCode::kDataLoss;
    case ErrorKind::kMissingLabel:
    case ErrorKind::kZeroDenominator:
      return absl::StatusCode::kFailedPrecondition;
    default:
      return absl::StatusCode::kInvalidArgument;
  }
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

absl::Status MakeError(ErrorKind kind, absl::string_view message) {
  absl::Status status(CodeFor(kind),
                      absl::StrCat(ErrorKindName(kind), ": ", message));
  status.SetPayload(kPayloadUrl, absl::Cord(ErrorKindName(kind)));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  const auto payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

}  // namespace distinf
