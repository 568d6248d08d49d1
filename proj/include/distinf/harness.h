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


// Experiment orchestration: model pools, per-pair attack evaluation and
// sweeps over a ratio grid.
//
// Seeds. The dataset of model k in the pool for grid index a, role r and
// repetition t is sampled with MixSeed(master_seed, r, a, t, k); the same
// seed initializes and shuffles that model's training. Adversary test sets
// use MixSeed(master_seed, kTestSet, a, t). Every other random choice is
// derived the same way, so outputs depend only on the config.

#ifndef DISTINF_HARNESS_H_
#define DISTINF_HARNESS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "distinf/experiment_config.h"
#include "distinf/meta_classifier.h"
#include "distinf/nets.h"
#include "distinf/synthdata.h"

namespace distinf {

enum class Role { kVictim, kAdversary };

// Runs fn(0..n-1) on up to `workers` threads. Each index runs exactly once;
// callers write results into per-index slots.
void ParallelFor(size_t n, int workers, const std::function<void(size_t)>& fn);

struct ModelPool {
  double alpha = 0.0;
  Role role = Role::kVictim;
  int rep = 0;
  std::vector<NetParams> models;
  std::vector<Dataset> datasets;  // training set of each model
  std::vector<uint64_t> seeds;
};

// Trains the configured number of models (n_victim or n_shadow) for grid
// index `alpha_index`.
absl::StatusOr<ModelPool> BuildPool(const ExperimentConfig& cfg,
                                    size_t alpha_index, Role role, int rep);

struct PairReport {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  AttackMode attack = AttackMode::kLoss;
  int rep = 0;
  double accuracy = 0.5;  // omega on the balanced victim set
  double advantage = 0.0;
  double n_leaked = 0.0;  // may be +inf
  bool below_chance = false;  // omega < 0.5; n_leaked forced to 0
  int64_t n_eval = 0;
  std::optional<double> mse;  // regression attacks only
  std::optional<std::string> error;
};

struct RegressionSummary {
  int rep = 0;
  double mse = 0.0;        // held out on every victim pool of the grid
  double blind_mse = 0.0;  // best constant guess against the grid
  std::vector<double> alpha;
  std::vector<double> alpha_mse;
  std::vector<double> alpha_n_leaked;  // alpha(1-alpha)/mse at that alpha
  std::vector<double> predictions;     // raw, victim pools in grid order
  std::vector<double> truths;
};

struct SweepResult {
  std::vector<double> grid;
  std::vector<AttackMode> attacks;
  std::string config_hash;
  int64_t dataset_size = 0;
  std::vector<PairReport> reports;
  std::vector<RegressionSummary> regression;
  std::vector<std::string> warnings;
};

// Population variance of the grid: the squared error of predicting the grid
// mean for every model when victims are spread evenly over the grid.
double BlindGuessMse(const std::vector<double>& grid);

// Caches pools, test sets and regression meta-classifiers across pairs.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }

  absl::StatusOr<const ModelPool*> Pool(size_t alpha_index, Role role, int rep);

  // One report per configured attack. alpha0 and alpha1 must be grid values;
  // kConfigError when alpha0 == alpha1 and a binary attack is configured.
  absl::StatusOr<std::vector<PairReport>> RunPair(double alpha0, double alpha1,
                                                  int rep);

  absl::StatusOr<RegressionSummary> RegressionHoldout(int rep);

  // Ordered pairs alpha0 < alpha1 (or the fixed_alpha0 pairs) x repetitions.
  // A failing pair is recorded with its error and the sweep continues.
  absl::StatusOr<SweepResult> RunSweep();

 private:
  absl::StatusOr<size_t> GridIndex(double alpha) const;
  absl::StatusOr<const Dataset*> TestSet(size_t alpha_index, int rep);
  absl::StatusOr<const MetaNet*> RegressionMeta(int rep);
  absl::Status CheckDisjoint(size_t alpha_index, int rep);

  ExperimentConfig cfg_;
  std::map<std::tuple<size_t, int, int>, std::unique_ptr<ModelPool>> pools_;
  std::map<std::pair<size_t, int>, std::unique_ptr<Dataset>> test_sets_;
  std::map<int, std::unique_ptr<MetaNet>> regression_meta_;
};

// Convenience wrappers over a fresh Experiment.
absl::StatusOr<std::vector<PairReport>> RunPair(const ExperimentConfig& cfg,
                                                double alpha0, double alpha1,
                                                int rep);
absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& cfg);

}  // namespace distinf

#endif  // DISTINF_HARNESS_H_
