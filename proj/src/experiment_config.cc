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


#include "distinf/experiment_config.h"

#include <cmath>
#include <initializer_list>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "distinf/dataset_io.h"
#include "distinf/nets_io.h"
#include "distinf/random.h"
#include "distinf/status.h"

namespace distinf {
namespace {

using nlohmann::json;

constexpr std::pair<AttackMode, absl::string_view> kAttackNames[] = {
    {AttackMode::kLoss, "loss"},
    {AttackMode::kThreshold, "threshold"},
    {AttackMode::kMeta, "meta"},
    {AttackMode::kMetaRegress, "meta-regress"},
    {AttackMode::kLayerRank, "layer-rank"},
};

absl::Status ConfigError(absl::string_view what) {
  return MakeError(ErrorKind::kConfigError, what);
}

absl::Status RejectUnknownKeys(const json& obj, absl::string_view where,
                               std::initializer_list<absl::string_view> known) {
  if (!obj.is_object()) return ConfigError(absl::StrCat(where, " must be an object"));
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const absl::string_view k : known) ok = ok || it.key() == k;
    if (!ok) return ConfigError(absl::StrCat("unknown key '", it.key(), "' in ", where));
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status Read(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return absl::OkStatus();
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw std::invalid_argument("integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw std::invalid_argument("number");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    return ConfigError(absl::StrCat("bad value for '", key, "'"));
  }
  return absl::OkStatus();
}

uint64_t Fnv1a(absl::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

absl::string_view AttackModeName(AttackMode mode) {
  for (const auto& [m, name] : kAttackNames) {
    if (m == mode) return name;
  }
  return "?";
}

absl::StatusOr<AttackMode> ParseAttackMode(absl::string_view name) {
  for (const auto& [m, n] : kAttackNames) {
    if (n == name) return m;
  }
  return MakeError(ErrorKind::kUnknownAttack,
                   absl::StrCat("unknown attack '", name, "'"));
}

bool IsBinaryAttack(AttackMode mode) { return mode != AttackMode::kMetaRegress; }

Architecture DefaultArchitecture(int feature_dims) {
  return {LayerSpec::Dense(feature_dims, 8), LayerSpec::Relu(),
          LayerSpec::Dense(8, 4),            LayerSpec::Relu(),
          LayerSpec::Dense(4, 1),            LayerSpec::SigmoidOutput()};
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig cfg;
  cfg.arch = DefaultArchitecture(cfg.underlying.feature_dims());
  return cfg;
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& cfg) {
  if (absl::Status s = ValidateUnderlyingSpec(cfg.underlying); !s.ok()) {
    return ConfigError(s.message());
  }
  if (cfg.alpha_grid.empty()) return ConfigError("alpha_grid is empty");
  absl::flat_hash_set<double> seen;
  for (const double a : cfg.alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) return ConfigError("alpha values must be in [0, 1]");
    if (!seen.insert(a).second) return ConfigError("alpha_grid has duplicates");
  }
  if (cfg.fixed_alpha0.has_value() && !seen.contains(*cfg.fixed_alpha0)) {
    return ConfigError("fixed_alpha0 must be one of the grid values");
  }
  if (cfg.dataset_size < 2 || cfg.n_victim < 1 || cfg.n_shadow < 1 ||
      cfg.test_set_size < 1 || cfg.layer_candidates < 1 ||
      cfg.repetitions < 1 || cfg.workers < 1) {
    return ConfigError("sizes, repetitions and workers must be positive");
  }
  if (cfg.attacks.empty()) return ConfigError("no attacks configured");
  absl::StatusOr<int> input = InputSize(cfg.arch);
  if (!input.ok()) return ConfigError(input.status().message());
  if (*input != cfg.underlying.feature_dims()) {
    return ConfigError(absl::StrFormat("arch takes %d inputs, data has %d",
                                       *input, cfg.underlying.feature_dims()));
  }
  if (absl::Status s = ValidateTrainConfig(cfg.train); !s.ok()) {
    return ConfigError(s.message());
  }
  return ValidateMetaConfig(cfg.meta);
}

json ExperimentConfigToJson(const ExperimentConfig& cfg) {
  const UnderlyingSpec& u = cfg.underlying;
  json attacks = json::array();
  for (const AttackMode m : cfg.attacks) attacks.push_back(std::string(AttackModeName(m)));
  json doc = {
      {"version", kConfigVersion},
      {"underlying",
       {{"noise_dims", u.noise_dims},
        {"signal_dims", u.signal_dims},
        {"signal_strength", u.signal_strength},
        {"label_property_coupling", u.label_property_coupling},
        {"rule_seed", u.rule_seed}}},
      {"alpha_grid", cfg.alpha_grid},
      {"fixed_alpha0",
       cfg.fixed_alpha0.has_value() ? json(*cfg.fixed_alpha0) : json(nullptr)},
      {"dataset_size", cfg.dataset_size},
      {"n_victim", cfg.n_victim},
      {"n_shadow", cfg.n_shadow},
      {"test_set_size", cfg.test_set_size},
      {"layer_candidates", cfg.layer_candidates},
      {"arch", ArchitectureToJson(cfg.arch)},
      {"train",
       {{"epochs", cfg.train.epochs},
        {"batch_size", cfg.train.batch_size},
        {"learning_rate", cfg.train.learning_rate},
        {"momentum", cfg.train.momentum}}},
      {"meta",
       {{"latent", cfg.meta.latent},
        {"head_hidden", cfg.meta.head_hidden},
        {"epochs", cfg.meta.epochs},
        {"batch_size", cfg.meta.batch_size},
        {"learning_rate", cfg.meta.learning_rate},
        {"momentum", cfg.meta.momentum},
        {"weight_decay", cfg.meta.weight_decay},
        {"clip_norm", cfg.meta.clip_norm}}},
      {"attacks", attacks},
      {"repetitions", cfg.repetitions},
      {"master_seed", cfg.master_seed},
      {"output_dir", cfg.output_dir},
      {"workers", cfg.workers},
  };
  return doc;
}

absl::StatusOr<ExperimentConfig> ExperimentConfigFromJson(const json& doc) {
  DISTINF_RETURN_IF_ERROR(RejectUnknownKeys(
      doc, "config",
      {"version", "underlying", "alpha_grid", "fixed_alpha0", "dataset_size",
       "n_victim", "n_shadow", "test_set_size", "layer_candidates", "arch",
       "train", "meta", "attacks", "repetitions", "master_seed", "output_dir",
       "workers"}));
  int version = kConfigVersion;
  DISTINF_RETURN_IF_ERROR(Read(doc, "version", version));
  if (version != kConfigVersion) {
    return ConfigError(absl::StrFormat("unsupported config version %d", version));
  }
  ExperimentConfig cfg;
  if (doc.contains("underlying")) {
    const json& u = doc["underlying"];
    DISTINF_RETURN_IF_ERROR(RejectUnknownKeys(
        u, "underlying",
        {"noise_dims", "signal_dims", "signal_strength",
         "label_property_coupling", "rule_seed"}));
    DISTINF_RETURN_IF_ERROR(Read(u, "noise_dims", cfg.underlying.noise_dims));
    DISTINF_RETURN_IF_ERROR(Read(u, "signal_dims", cfg.underlying.signal_dims));
    DISTINF_RETURN_IF_ERROR(
        Read(u, "signal_strength", cfg.underlying.signal_strength));
    DISTINF_RETURN_IF_ERROR(Read(u, "label_property_coupling",
                                 cfg.underlying.label_property_coupling));
    DISTINF_RETURN_IF_ERROR(Read(u, "rule_seed", cfg.underlying.rule_seed));
  }
  DISTINF_RETURN_IF_ERROR(Read(doc, "alpha_grid", cfg.alpha_grid));
  if (doc.contains("fixed_alpha0") && !doc["fixed_alpha0"].is_null()) {
    double a0 = 0;
    DISTINF_RETURN_IF_ERROR(Read(doc, "fixed_alpha0", a0));
    cfg.fixed_alpha0 = a0;
  }
  DISTINF_RETURN_IF_ERROR(Read(doc, "dataset_size", cfg.dataset_size));
  DISTINF_RETURN_IF_ERROR(Read(doc, "n_victim", cfg.n_victim));
  DISTINF_RETURN_IF_ERROR(Read(doc, "n_shadow", cfg.n_shadow));
  DISTINF_RETURN_IF_ERROR(Read(doc, "test_set_size", cfg.test_set_size));
  DISTINF_RETURN_IF_ERROR(Read(doc, "layer_candidates", cfg.layer_candidates));
  if (doc.contains("arch")) {
    absl::StatusOr<Architecture> arch = ArchitectureFromJson(doc["arch"]);
    if (!arch.ok()) return ConfigError(arch.status().message());
    cfg.arch = *std::move(arch);
  } else {
    cfg.arch = DefaultArchitecture(cfg.underlying.feature_dims());
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    DISTINF_RETURN_IF_ERROR(RejectUnknownKeys(
        t, "train", {"epochs", "batch_size", "learning_rate", "momentum"}));
    DISTINF_RETURN_IF_ERROR(Read(t, "epochs", cfg.train.epochs));
    DISTINF_RETURN_IF_ERROR(Read(t, "batch_size", cfg.train.batch_size));
    DISTINF_RETURN_IF_ERROR(Read(t, "learning_rate", cfg.train.learning_rate));
    DISTINF_RETURN_IF_ERROR(Read(t, "momentum", cfg.train.momentum));
  }
  if (doc.contains("meta")) {
    const json& m = doc["meta"];
    DISTINF_RETURN_IF_ERROR(RejectUnknownKeys(
        m, "meta",
        {"latent", "head_hidden", "epochs", "batch_size", "learning_rate",
         "momentum", "weight_decay", "clip_norm"}));
    DISTINF_RETURN_IF_ERROR(Read(m, "latent", cfg.meta.latent));
    DISTINF_RETURN_IF_ERROR(Read(m, "head_hidden", cfg.meta.head_hidden));
    DISTINF_RETURN_IF_ERROR(Read(m, "epochs", cfg.meta.epochs));
    DISTINF_RETURN_IF_ERROR(Read(m, "batch_size", cfg.meta.batch_size));
    DISTINF_RETURN_IF_ERROR(Read(m, "learning_rate", cfg.meta.learning_rate));
    DISTINF_RETURN_IF_ERROR(Read(m, "momentum", cfg.meta.momentum));
    DISTINF_RETURN_IF_ERROR(Read(m, "weight_decay", cfg.meta.weight_decay));
    DISTINF_RETURN_IF_ERROR(Read(m, "clip_norm", cfg.meta.clip_norm));
  }
  if (doc.contains("attacks")) {
    if (!doc["attacks"].is_array()) return ConfigError("attacks must be a list");
    cfg.attacks.clear();
    for (const json& a : doc["attacks"]) {
      if (!a.is_string()) return ConfigError("attack names must be strings");
      DISTINF_ASSIGN_OR_RETURN(const AttackMode m,
                               ParseAttackMode(a.get<std::string>()));
      cfg.attacks.push_back(m);
    }
  }
  DISTINF_RETURN_IF_ERROR(Read(doc, "repetitions", cfg.repetitions));
  DISTINF_RETURN_IF_ERROR(Read(doc, "master_seed", cfg.master_seed));
  DISTINF_RETURN_IF_ERROR(Read(doc, "output_dir", cfg.output_dir));
  DISTINF_RETURN_IF_ERROR(Read(doc, "workers", cfg.workers));
  DISTINF_RETURN_IF_ERROR(ValidateExperimentConfig(cfg));
  return cfg;
}

absl::StatusOr<ExperimentConfig> ReadExperimentConfig(const std::string& path) {
  DISTINF_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return ConfigError(absl::StrCat(path, " is not valid JSON"));
  }
  return ExperimentConfigFromJson(doc);
}

std::string ConfigHash(const ExperimentConfig& cfg) {
  json doc = ExperimentConfigToJson(cfg);
  doc.erase("output_dir");
  doc.erase("workers");
  return absl::StrFormat("%016x", Mix64(Fnv1a(doc.dump())));
}

}  // namespace distinf
