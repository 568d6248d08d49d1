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

// Small feed-forward binary classifiers (dense and 2-D convolution layers)
// trained from scratch with minibatch SGD. These are the models that the
// attacks in attacks.h inspect.
//
// Layout contract (shared with the serialized form in nets_io.h):
//  * Dense(in, out): weights are an out x in matrix, row-major, so row o
//    holds the incoming weights of output neuron o.
//  * Conv2D(k1, k2, c_in, c_out): kernel axes (k1, k2, c_in, c_out),
//    row-major; element (i, j, ci, co) is at ((i*k2 + j)*c_in + ci)*c_out + co.
//    Valid padding, stride 1.
//  * Spatial activations are (height, width, channels), row-major; Flatten
//    keeps that order.
//
// A network must end with SigmoidOutput on a single logit. Convolutional
// networks start with an Input(height, width, channels) layer describing how
// the flat feature vector is reshaped; dense-only networks may omit it.

#ifndef DISTINF_NETS_H_
#define DISTINF_NETS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "distinf/synthdata.h"

namespace distinf {

enum class LayerKind { kInput, kDense, kConv2D, kRelu, kFlatten, kSigmoidOutput };

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  // Dense: in, out. Conv2D: k1, k2, c_in, c_out. Input: height, width,
  // channels (stored in k1, k2, c_in).
  int in = 0;
  int out = 0;
  int k1 = 0;
  int k2 = 0;
  int c_in = 0;
  int c_out = 0;

  static LayerSpec Input(int height, int width, int channels);
  static LayerSpec Dense(int in, int out);
  static LayerSpec Conv2D(int k1, int k2, int c_in, int c_out);
  static LayerSpec Relu();
  static LayerSpec Flatten();
  static LayerSpec SigmoidOutput();

  bool has_params() const {
    return kind == LayerKind::kDense || kind == LayerKind::kConv2D;
  }
  int weight_count() const;
  int bias_count() const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

using Architecture = std::vector<LayerSpec>;

struct TensorShape {
  int height = 1;
  int width = 1;
  int channels = 0;
  bool spatial = false;

  int size() const { return height * width * channels; }
};

// Shape of the input (index 0) and after every layer (index i + 1).
// kIncompatibleArch on any inconsistency.
absl::StatusOr<std::vector<TensorShape>> ResolveShapes(const Architecture& arch);

// Flat input length the architecture expects.
absl::StatusOr<int> InputSize(const Architecture& arch);

// Indices into `arch` of the Relu layers.
std::vector<int> ReluLayerIndices(const Architecture& arch);

struct ParamBlock {
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const ParamBlock&, const ParamBlock&) = default;
};

struct NetParams {
  Architecture arch;
  std::vector<ParamBlock> layers;  // one per Dense / Conv2D, in arch order

  friend bool operator==(const NetParams&, const NetParams&) = default;
};

// Checks arch validity and that every block has the right sizes and finite
// values. kIncompatibleArch / kShapeMismatch.
absl::Status ValidateNet(const NetParams& net);

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  uint64_t seed = 0;
};

absl::Status ValidateTrainConfig(const TrainConfig& cfg);

// Weights ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases 0.
absl::StatusOr<NetParams> InitNet(const Architecture& arch, uint64_t seed);

// Probability of label 1. kShapeMismatch on a wrong input length.
absl::StatusOr<double> Forward(const NetParams& net, std::span<const double> x);

// Binary cross-entropy with the probability clamped to [1e-12, 1 - 1e-12].
double BinaryCrossEntropy(double probability, int label);

// Adds d(BCE)/d(params) for one example into `grad` (which must be shaped
// like net.layers) and returns the loss. The logit gradient is p - y.
absl::StatusOr<double> AccumulateGradient(const NetParams& net,
                                          std::span<const double> x, int label,
                                          std::vector<ParamBlock>& grad);

// Zero-valued blocks shaped like net.layers.
std::vector<ParamBlock> ZeroGradients(const NetParams& net);

// Minibatch SGD with momentum on BCE, fixed epoch count. Epoch e shuffles
// with MixSeed(cfg.seed, e). kNumericalDivergence if any parameter becomes
// non-finite.
absl::StatusOr<NetParams> Train(const NetParams& net, const Dataset& data,
                                const TrainConfig& cfg);

// Fraction of records where [Forward >= 0.5] equals the label.
absl::StatusOr<double> Accuracy(const NetParams& net, const Dataset& data);

// Output of layer `layer_index` (which must be a Relu layer), flattened.
// kBadLayerIndex otherwise.
absl::StatusOr<std::vector<double>> Activations(const NetParams& net,
                                                std::span<const double> x,
                                                int layer_index);

}  // namespace distinf

#endif  // DISTINF_NETS_H_
