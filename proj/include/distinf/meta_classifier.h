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


// Permutation-invariant meta-classifier over model parameters.
//
// Each parameterized layer i of the target network is read as a set of rows
// (LayerRows in attacks.h). Every raw row is standardized column-wise with
// statistics fixed at training time, the previous layer's representation
// L_{i-1} is appended to it (L_0 is empty), and the per-layer set function
// phi_i maps the row to R^latent:
//
//   phi_i(r) = W2 relu(W1 r + b1) + b2,     L_i = sum_rows phi_i(r).
//
// The head rho (same two-layer form) maps the concatenation of all L_i to a
// logit (binary mode) or a ratio estimate (regression mode). Rows are summed
// in sorted order of their raw values, so L_i is bitwise invariant under any
// reordering of a layer's rows.

#ifndef DISTINF_META_CLASSIFIER_H_
#define DISTINF_META_CLASSIFIER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "distinf/attacks.h"
#include "distinf/nets.h"

namespace distinf {

enum class MetaMode { kBinary, kRegression };

struct MetaConfig {
  int latent = 16;       // width of every L_i and of phi's hidden layer
  int head_hidden = 16;  // hidden width of rho
  int epochs = 300;
  int batch_size = 8;
  double learning_rate = 0.005;
  double momentum = 0.9;
  double weight_decay = 1e-2;
  double clip_norm = 5.0;  // global gradient-norm clip per batch; 0 disables
};

absl::Status ValidateMetaConfig(const MetaConfig& cfg);

// y = W2 relu(W1 x + b1) + b2 with W1: hidden x in, W2: out x hidden,
// both row-major.
struct Mlp {
  int in = 0;
  int hidden = 0;
  int out = 0;
  std::vector<double> w1, b1, w2, b2;

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

std::vector<double> MlpForward(const Mlp& mlp, std::span<const double> x);

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> inv_scale;
};

struct MetaNet {
  MetaMode mode = MetaMode::kBinary;
  Architecture signature;
  MetaConfig cfg;
  std::vector<Mlp> phi;         // one per parameterized layer
  std::vector<ColumnStats> stats;  // raw-row standardization per layer
  Mlp rho;
};

// Random phi/rho (uniform +-sqrt(6/fan_in), zero biases) and identity
// standardization. kIncompatibleArch on a bad signature.
absl::StatusOr<MetaNet> InitMetaNet(const Architecture& signature,
                                    MetaMode mode, const MetaConfig& cfg,
                                    uint64_t seed);

// sum_j phi(rows[j]), accumulated in sorted row order. kShapeMismatch when a
// row width differs from phi.in.
absl::StatusOr<std::vector<double>> LayerRepresentation(
    const Mlp& phi, std::span<const std::vector<double>> rows);

// Concatenation of L_1..L_k. kArchMismatch when net.arch differs from the
// signature.
absl::StatusOr<std::vector<double>> FeaturizeModel(const MetaNet& meta,
                                                   const NetParams& net);

// Binary: probability that the model came from the second distribution.
// Regression: the predicted ratio, unclamped.
absl::StatusOr<double> MetaPredict(const MetaNet& meta, const NetParams& net);

// Fits standardization statistics on the pool, then trains phi and rho by
// minibatch SGD with momentum: cross-entropy on dist_labels (binary) or
// squared error on alpha_labels (regression). kMissingLabel when the
// labels the mode needs are absent.
absl::StatusOr<MetaNet> MetaTrain(const ShadowPool& pool, MetaMode mode,
                                  const MetaConfig& cfg, uint64_t seed);

// All trainable parameters (phi in layer order, then rho; within an Mlp
// w1, b1, w2, b2) as one vector, and its inverse.
std::vector<double> FlattenMetaParams(const MetaNet& meta);
absl::Status UnflattenMetaParams(std::span<const double> flat, MetaNet& meta);

struct MetaLossGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // laid out like FlattenMetaParams
};

// Loss of one example (BCE on the logit for binary, squared error for
// regression) and its gradient, without weight decay.
absl::StatusOr<MetaLossGradient> MetaLossAndGradient(const MetaNet& meta,
                                                     const NetParams& net,
                                                     double target);

}  // namespace distinf

#endif  // DISTINF_META_CLASSIFIER_H_
