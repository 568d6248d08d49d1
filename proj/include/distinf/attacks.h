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


// Black-box and white-box distribution inference attacks on NetParams:
// the loss test, the shadow-model threshold test, the convolution kernel
// flattening used by the meta-classifier, and the activation-count layer
// ranking. The meta-classifier itself lives in meta_classifier.h.

#ifndef DISTINF_ATTACKS_H_
#define DISTINF_ATTACKS_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "distinf/leakage.h"
#include "distinf/nets.h"

namespace distinf {

// Models the adversary trained locally. dist_labels[i] says which of the two
// candidate distributions produced model i; alpha_labels carries the ratio
// for regression training and may be empty otherwise.
struct ShadowPool {
  std::vector<NetParams> models;
  std::vector<int> dist_labels;
  std::vector<double> alpha_labels;

  size_t size() const { return models.size(); }
};

// Equal lengths and bit-valued labels. With `need_both_labels`, both classes
// must occur (kMissingLabel otherwise).
absl::Status ValidateShadowPool(const ShadowPool& pool, bool need_both_labels);

struct LossTestResult {
  int prediction = 0;
  bool tie = false;
};

// Predicts 1 iff acc0 < acc1; equality predicts 0 and sets the tie flag.
LossTestResult LossTest(double acc0, double acc1);

// The inequality on the score that predicts 1.
enum class Direction { kGreaterEq, kLess };

absl::string_view DirectionName(Direction direction);

// Prediction of a fitted threshold: [score >= t] under kGreaterEq,
// [score < t] under kLess.
int ApplyThreshold(double threshold, Direction direction, double score);

struct ScoreThreshold {
  double threshold = 0.0;
  Direction direction = Direction::kGreaterEq;
  int64_t correct = 0;  // training models classified correctly
  bool tie = false;     // more than one candidate reached `correct`
};

// Picks the orientation from gamma = sum_{y=0} score - sum_{y=1} score
// (gamma >= 0 means class 0 scores high, so kLess predicts 1) and then the
// smallest candidate threshold maximizing the number of correct
// predictions. Candidates are the midpoints of consecutive distinct scores
// plus min - 1 and max + 1. kMissingLabel when a class is absent.
absl::StatusOr<ScoreThreshold> FitScoreThreshold(std::span<const int> labels,
                                                 std::span<const double> scores);

struct AttackRule {
  int chosen_set = 0;  // k: which candidate test set the rule reads
  double threshold = 0.0;
  Direction direction = Direction::kGreaterEq;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  int64_t train_correct = 0;
  bool tie = false;
};

// s0_accs[i] and s1_accs[i] are the accuracies of shadow model i on the
// adversary's samples from the two distributions. k = 1 iff
// |gamma0| < |gamma1|.
absl::StatusOr<AttackRule> ThresholdFit(std::span<const int> dist_labels,
                                        std::span<const double> s0_accs,
                                        std::span<const double> s1_accs);

int ThresholdApply(const AttackRule& rule, double acc_on_chosen_set);

// Flattens a (k1, k2, c_in, c_out) kernel into c_out rows of
// k1*k2*c_in + 1 values: row co lists kernel(i, j, ci, co) with i outermost
// and ci innermost, then bias[co].
absl::StatusOr<std::vector<std::vector<double>>> ConvFlatten(
    const LayerSpec& layer, std::span<const double> kernel,
    std::span<const double> bias);

// Rows of a parameterized layer as seen by the meta-classifier: dense
// layers give one [weight row, bias] per output neuron, conv layers the
// ConvFlatten rows.
absl::StatusOr<std::vector<std::vector<double>>> LayerRows(
    const LayerSpec& layer, const ParamBlock& block);

// Predicts 1 iff pred >= (alpha0 + alpha1) / 2. kEqualRatios when the two
// ratios coincide.
absl::StatusOr<int> RegressionToBinary(double pred, const RatioPair& pair);

// Number of strictly positive entries after Relu layer j.
absl::StatusOr<int> ActivationCount(const NetParams& net,
                                    std::span<const double> x, int layer_index);

struct LayerSelection {
  size_t candidate = 0;  // index into the candidate list
  double gap = 0.0;
};

// The candidate maximizing |sum_{y=0} count - sum_{y=1} count| at layer j;
// first occurrence wins ties.
absl::StatusOr<LayerSelection> LayerSelect(
    const ShadowPool& pool, std::span<const std::vector<double>> candidates,
    int layer_index);

struct LayerScore {
  int layer_index = 0;
  double holdout_accuracy = 0.0;
  size_t candidate = 0;
  ScoreThreshold rule;
};

// For each Relu layer: select an input on `pool`, fit a threshold on its
// activation counts, score it on `holdout`. Sorted by descending holdout
// accuracy, lower layer index first on ties.
absl::StatusOr<std::vector<LayerScore>> LayerRank(
    const ShadowPool& pool, std::span<const std::vector<double>> candidates,
    const ShadowPool& holdout);

}  // namespace distinf

#endif  // DISTINF_ATTACKS_H_
