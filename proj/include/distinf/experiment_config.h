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


// Sweep configuration and its JSON form. See docs/formats.md for the schema.

#ifndef DISTINF_EXPERIMENT_CONFIG_H_
#define DISTINF_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "distinf/meta_classifier.h"
#include "distinf/nets.h"
#include "distinf/synthdata.h"
#include "json.hpp"

namespace distinf {

enum class AttackMode { kLoss, kThreshold, kMeta, kMetaRegress, kLayerRank };

absl::string_view AttackModeName(AttackMode mode);
// kUnknownAttack for anything but loss|threshold|meta|meta-regress|layer-rank.
absl::StatusOr<AttackMode> ParseAttackMode(absl::string_view name);
// True for attacks that predict a bit from a (alpha0, alpha1) pair fit.
bool IsBinaryAttack(AttackMode mode);

inline constexpr int kConfigVersion = 1;

struct ExperimentConfig {
  UnderlyingSpec underlying;
  std::vector<double> alpha_grid = {0.0, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::optional<double> fixed_alpha0;
  int64_t dataset_size = 500;   // m, records per victim/shadow training set
  int n_victim = 40;            // victims per distribution
  int n_shadow = 20;            // shadow models per distribution
  int64_t test_set_size = 500;  // adversary samples per distribution (loss and threshold tests)
  int layer_candidates = 32;    // candidate inputs for the layer-rank attack
  Architecture arch;
  TrainConfig train;
  MetaConfig meta;
  std::vector<AttackMode> attacks = {AttackMode::kLoss, AttackMode::kThreshold,
                                     AttackMode::kMeta,
                                     AttackMode::kMetaRegress};
  int repetitions = 1;
  uint64_t master_seed = 0;
  std::string output_dir = "sweep_out";
  int workers = 1;  // does not affect any output
};

// Dense(d, 8) - Relu - Dense(8, 4) - Relu - Dense(4, 1) - Sigmoid.
Architecture DefaultArchitecture(int feature_dims);

// Defaults with arch filled in for `underlying`.
ExperimentConfig DefaultExperimentConfig();

// kConfigError on any violated constraint.
absl::Status ValidateExperimentConfig(const ExperimentConfig& cfg);

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
absl::StatusOr<ExperimentConfig> ExperimentConfigFromJson(
    const nlohmann::json& doc);
absl::StatusOr<ExperimentConfig> ReadExperimentConfig(const std::string& path);

// 16 hex digits identifying everything that affects results (output_dir
// and workers excluded).
std::string ConfigHash(const ExperimentConfig& cfg);

}  // namespace distinf

#endif  // DISTINF_EXPERIMENT_CONFIG_H_
