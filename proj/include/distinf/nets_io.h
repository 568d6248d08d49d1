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


// JSON model documents:
//
//   {"format": "distinf.net.v1",
//    "arch": [{"kind": "dense", "in": 6, "out": 8}, {"kind": "relu"}, ...],
//    "layers": [{"w": [...], "b": [...]}, ...]}
//
// Weights follow the layout contract in nets.h and are written as
// shortest round-trip decimals, so reading a document back is exact.

#ifndef DISTINF_NETS_IO_H_
#define DISTINF_NETS_IO_H_

#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/statusor.h"
#include "distinf/nets.h"
#include "json.hpp"

namespace distinf {

inline constexpr absl::string_view kNetFormat = "distinf.net.v1";

nlohmann::json ArchitectureToJson(const Architecture& arch);
// kMalformedDocument on unknown kinds or missing fields. Shape compatibility
// is not checked here.
absl::StatusOr<Architecture> ArchitectureFromJson(const nlohmann::json& doc);

std::string SerializeNet(const NetParams& net);
// kMalformedDocument on parse errors, kShapeMismatch / kIncompatibleArch when
// the parameters do not fit the architecture.
absl::StatusOr<NetParams> DeserializeNet(absl::string_view text);

absl::Status WriteNetFile(const std::string& path, const NetParams& net);
absl::StatusOr<NetParams> ReadNetFile(const std::string& path);

}  // namespace distinf

#endif  // DISTINF_NETS_IO_H_
