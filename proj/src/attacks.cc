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


#include "distinf/attacks.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "absl/strings/str_format.h"
#include "distinf/status.h"

namespace distinf {
namespace {

absl::Status CheckLabels(std::span<const int> labels, bool need_both) {
  bool seen[2] = {false, false};
  for (const int y : labels) {
    if (y != 0 && y != 1) {
      return MakeError(ErrorKind::kInvalidArgument, "labels must be bits");
    }
    seen[y] = true;
  }
  if (need_both && !(seen[0] && seen[1])) {
    return MakeError(ErrorKind::kMissingLabel,
                     absl::StrFormat("pool has no models with label %d",
                                     seen[0] ? 1 : 0));
  }
  return absl::OkStatus();
}

double Gamma(std::span<const int> labels, std::span<const double> scores) {
  double gamma = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    gamma += labels[i] == 0 ? scores[i] : -scores[i];
  }
  return gamma;
}

int64_t CountCorrect(std::span<const int> labels,
                     std::span<const double> scores, double threshold,
                     Direction direction) {
  int64_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (ApplyThreshold(threshold, direction, scores[i]) == labels[i]) ++correct;
  }
  return correct;
}

}  // namespace

absl::Status ValidateShadowPool(const ShadowPool& pool, bool need_both_labels) {
  if (pool.models.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "shadow pool is empty");
  }
  if (pool.dist_labels.size() != pool.models.size() ||
      (!pool.alpha_labels.empty() &&
       pool.alpha_labels.size() != pool.models.size())) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "shadow pool label lists do not match the model count");
  }
  return CheckLabels(pool.dist_labels, need_both_labels);
}

LossTestResult LossTest(double acc0, double acc1) {
  if (acc0 == acc1) return {0, true};
  return {acc0 < acc1 ? 1 : 0, false};
}

absl::string_view DirectionName(Direction direction) {
  return direction == Direction::kGreaterEq ? "greater_eq" : "less";
}

int ApplyThreshold(double threshold, Direction direction, double score) {
  if (direction == Direction::kGreaterEq) return score >= threshold ? 1 : 0;
  return score < threshold ? 1 : 0;
}

absl::StatusOr<ScoreThreshold> FitScoreThreshold(
    std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "labels and scores differ in length");
  }
  DISTINF_RETURN_IF_ERROR(CheckLabels(labels, /*need_both=*/true));
  for (const double s : scores) {
    if (!std::isfinite(s)) {
      return MakeError(ErrorKind::kInvalidArgument, "scores must be finite");
    }
  }

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> candidates;
  candidates.reserve(sorted.size() + 1);
  candidates.push_back(sorted.front() - 1.0);
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    candidates.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
  }
  candidates.push_back(sorted.back() + 1.0);

  ScoreThreshold best;
  best.direction =
      Gamma(labels, scores) >= 0.0 ? Direction::kLess : Direction::kGreaterEq;
  best.correct = -1;
  for (const double t : candidates) {
    const int64_t correct = CountCorrect(labels, scores, t, best.direction);
    if (correct > best.correct) {
      best.threshold = t;
      best.correct = correct;
      best.tie = false;
    } else if (correct == best.correct) {
      best.tie = true;
    }
  }
  return best;
}

absl::StatusOr<AttackRule> ThresholdFit(std::span<const int> dist_labels,
                                        std::span<const double> s0_accs,
                                        std::span<const double> s1_accs) {
  if (dist_labels.size() != s0_accs.size() ||
      dist_labels.size() != s1_accs.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     "accuracy lists must align with the pool");
  }
  DISTINF_RETURN_IF_ERROR(CheckLabels(dist_labels, /*need_both=*/true));
  AttackRule rule;
  rule.gamma0 = Gamma(dist_labels, s0_accs);
  rule.gamma1 = Gamma(dist_labels, s1_accs);
  rule.chosen_set = std::abs(rule.gamma0) < std::abs(rule.gamma1) ? 1 : 0;
  DISTINF_ASSIGN_OR_RETURN(
      const ScoreThreshold fit,
      FitScoreThreshold(dist_labels, rule.chosen_set == 0 ? s0_accs : s1_accs));
  rule.threshold = fit.threshold;
  rule.direction = fit.direction;
  rule.train_correct = fit.correct;
  rule.tie = fit.tie;
  return rule;
}

int ThresholdApply(const AttackRule& rule, double acc_on_chosen_set) {
  return ApplyThreshold(rule.threshold, rule.direction, acc_on_chosen_set);
}

absl::StatusOr<std::vector<std::vector<double>>> ConvFlatten(
    const LayerSpec& layer, std::span<const double> kernel,
    std::span<const double> bias) {
  if (layer.kind != LayerKind::kConv2D) {
    return MakeError(ErrorKind::kShapeMismatch, "not a convolution layer");
  }
  const size_t slice = static_cast<size_t>(layer.k1) * layer.k2 * layer.c_in;
  if (kernel.size() != slice * layer.c_out ||
      bias.size() != static_cast<size_t>(layer.c_out)) {
    return MakeError(ErrorKind::kShapeMismatch,
                     absl::StrFormat("kernel has %d values and bias %d, "
                                     "expected %d and %d",
                                     kernel.size(), bias.size(),
                                     slice * layer.c_out, layer.c_out));
  }
  std::vector<std::vector<double>> rows(layer.c_out);
  for (int co = 0; co < layer.c_out; ++co) {
    std::vector<double>& row = rows[co];
    row.reserve(slice + 1);
    for (size_t s = 0; s < slice; ++s) row.push_back(kernel[s * layer.c_out + co]);
    row.push_back(bias[co]);
  }
  return rows;
}

absl::StatusOr<std::vector<std::vector<double>>> LayerRows(
    const LayerSpec& layer, const ParamBlock& block) {
  if (layer.kind == LayerKind::kConv2D) {
    return ConvFlatten(layer, block.weights, block.bias);
  }
  if (layer.kind != LayerKind::kDense) {
    return MakeError(ErrorKind::kShapeMismatch, "layer has no parameters");
  }
  if (static_cast<int>(block.weights.size()) != layer.weight_count() ||
      static_cast<int>(block.bias.size()) != layer.out) {
    return MakeError(ErrorKind::kShapeMismatch,
                     "dense block does not match its layer");
  }
  std::vector<std::vector<double>> rows(layer.out);
  for (int o = 0; o < layer.out; ++o) {
    const auto begin = block.weights.begin() + static_cast<ptrdiff_t>(o) * layer.in;
    rows[o].assign(begin, begin + layer.in);
    rows[o].push_back(block.bias[o]);
  }
  return rows;
}

absl::StatusOr<int> RegressionToBinary(double pred, const RatioPair& pair) {
  if (pair.alpha0 == pair.alpha1) {
    return MakeError(ErrorKind::kEqualRatios,
                     "regression-to-binary needs two distinct ratios");
  }
  return pred >= (pair.alpha0 + pair.alpha1) / 2.0 ? 1 : 0;
}

absl::StatusOr<int> ActivationCount(const NetParams& net,
                                    std::span<const double> x,
                                    int layer_index) {
  DISTINF_ASSIGN_OR_RETURN(const std::vector<double> acts,
                           Activations(net, x, layer_index));
  return static_cast<int>(
      std::count_if(acts.begin(), acts.end(), [](double a) { return a > 0; }));
}

namespace {

// counts[c][i] = activation count of model i on candidate c.
absl::StatusOr<std::vector<std::vector<double>>> CountTable(
    const ShadowPool& pool, std::span<const std::vector<double>> candidates,
    int layer_index) {
  std::vector<std::vector<double>> counts(candidates.size(),
                                          std::vector<double>(pool.size()));
  for (size_t c = 0; c < candidates.size(); ++c) {
    for (size_t i = 0; i < pool.size(); ++i) {
      DISTINF_ASSIGN_OR_RETURN(
          const int n, ActivationCount(pool.models[i], candidates[c], layer_index));
      counts[c][i] = n;
    }
  }
  return counts;
}

}  // namespace

absl::StatusOr<LayerSelection> LayerSelect(
    const ShadowPool& pool, std::span<const std::vector<double>> candidates,
    int layer_index) {
  DISTINF_RETURN_IF_ERROR(ValidateShadowPool(pool, /*need_both_labels=*/true));
  if (candidates.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "no candidate inputs");
  }
  DISTINF_ASSIGN_OR_RETURN(const auto counts,
                           CountTable(pool, candidates, layer_index));
  LayerSelection best;
  best.gap = -1.0;
  for (size_t c = 0; c < candidates.size(); ++c) {
    const double gap = std::abs(Gamma(pool.dist_labels, counts[c]));
    if (gap > best.gap) best = {c, gap};
  }
  return best;
}

absl::StatusOr<std::vector<LayerScore>> LayerRank(
    const ShadowPool& pool, std::span<const std::vector<double>> candidates,
    const ShadowPool& holdout) {
  DISTINF_RETURN_IF_ERROR(ValidateShadowPool(pool, /*need_both_labels=*/true));
  DISTINF_RETURN_IF_ERROR(
      ValidateShadowPool(holdout, /*need_both_labels=*/false));
  const Architecture& arch = pool.models.front().arch;
  for (const ShadowPool* p : {&pool, &holdout}) {
    for (const NetParams& net : p->models) {
      if (net.arch != arch) {
        return MakeError(ErrorKind::kArchMismatch,
                         "layer ranking needs a single architecture");
      }
    }
  }

  std::vector<LayerScore> ranking;
  for (const int j : ReluLayerIndices(arch)) {
    DISTINF_ASSIGN_OR_RETURN(const LayerSelection sel,
                             LayerSelect(pool, candidates, j));
    std::vector<double> counts(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
      DISTINF_ASSIGN_OR_RETURN(
          const int n, ActivationCount(pool.models[i], candidates[sel.candidate], j));
      counts[i] = n;
    }
    LayerScore score;
    score.layer_index = j;
    score.candidate = sel.candidate;
    DISTINF_ASSIGN_OR_RETURN(score.rule,
                             FitScoreThreshold(pool.dist_labels, counts));
    int64_t correct = 0;
    for (size_t i = 0; i < holdout.size(); ++i) {
      DISTINF_ASSIGN_OR_RETURN(
          const int n,
          ActivationCount(holdout.models[i], candidates[sel.candidate], j));
      if (ApplyThreshold(score.rule.threshold, score.rule.direction, n) ==
          holdout.dist_labels[i]) {
        ++correct;
      }
    }
    score.holdout_accuracy =
        static_cast<double>(correct) / static_cast<double>(holdout.size());
    ranking.push_back(score);
  }
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const LayerScore& a, const LayerScore& b) {
                     return a.holdout_accuracy > b.holdout_accuracy;
                   });
  return ranking;
}

}  // namespace distinf
