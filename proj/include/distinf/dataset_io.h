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

// Dataset files. See docs/formats.md for the byte layouts.
//
// CSV: header "f0,...,f{D-1},label,property", one record per line, features
// printed with 17 significant digits so reading back is exact. The CSV form
// carries no generator metadata.
//
// Binary container: little-endian, magic "DINFDS01", generator metadata
// followed by the records.

#ifndef DISTINF_DATASET_IO_H_
#define DISTINF_DATASET_IO_H_

#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/statusor.h"
#include "distinf/synthdata.h"

namespace distinf {

std::string DatasetToCsv(const Dataset& dataset);
absl::StatusOr<Dataset> DatasetFromCsv(absl::string_view text);

std::string DatasetToBinary(const Dataset& dataset);
absl::StatusOr<Dataset> DatasetFromBinary(absl::string_view bytes);

// Dispatches on the file's leading bytes.
absl::StatusOr<Dataset> ReadDatasetFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);
absl::StatusOr<std::string> ReadFile(const std::string& path);

}  // namespace distinf

#endif  // DISTINF_DATASET_IO_H_
