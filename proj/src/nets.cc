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

#include "distinf/nets.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"
#include "distinf/random.h"
#include "distinf/status.h"

namespace distinf {
namespace {

constexpr double kProbabilityFloor = 1e-12;

absl::Status Incompatible(int index, absl::string_view why) {
  return MakeError(ErrorKind::kIncompatibleArch,
                   absl::StrFormat("layer %d: %s", index, why));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Forward/backward buffers for one network; reused across examples.
class Evaluator {
 public:
  Evaluator(const NetParams& net, std::vector<TensorShape> shapes)
      : net_(net), shapes_(std::move(shapes)) {
    acts_.resize(shapes_.size());
    deltas_.resize(shapes_.size());
    for (size_t i = 0; i < shapes_.size(); ++i) {
      acts_[i].assign(shapes_[i].size(), 0.0);
      deltas_[i].assign(shapes_[i].size(), 0.0);
    }
    int block = 0;
    for (const LayerSpec& layer : net_.arch) {
      block_index_.push_back(layer.has_params() ? block++ : -1);
    }
  }

  // Runs layers [0, upto] and returns the final buffer.
  const std::vector<double>& Run(std::span<const double> x, int upto) {
    std::copy(x.begin(), x.end(), acts_[0].begin());
    for (int i = 0; i <= upto; ++i) Step(i);
    return acts_[upto + 1];
  }

  double Probability(std::span<const double> x) {
    return Run(x, static_cast<int>(net_.arch.size()) - 1)[0];
  }

  // Backpropagates BCE from the last forward pass into `grad`.
  void Backward(int label, std::vector<ParamBlock>& grad) {
    const int last = static_cast<int>(net_.arch.size()) - 1;
    for (int i = last; i >= 0; --i) BackStep(i, label, grad);
  }

 private:
  void Step(int i) {
    const LayerSpec& layer = net_.arch[i];
    const std::vector<double>& in = acts_[i];
    std::vector<double>& out = acts_[i + 1];
    switch (layer.kind) {
      case LayerKind::kInput:
      case LayerKind::kFlatten:
        std::copy(in.begin(), in.end(), out.begin());
        break;
      case LayerKind::kRelu:
        for (size_t k = 0; k < in.size(); ++k) out[k] = in[k] > 0 ? in[k] : 0;
        break;
      case LayerKind::kSigmoidOutput:
        out[0] = Sigmoid(in[0]);
        break;
      case LayerKind::kDense: {
        const ParamBlock& p = net_.layers[block_index_[i]];
        for (int o = 0; o < layer.out; ++o) {
          const double* row = p.weights.data() + static_cast<size_t>(o) * layer.in;
          double acc = p.bias[o];
          for (int j = 0; j < layer.in; ++j) acc += row[j] * in[j];
          out[o] = acc;
        }
        break;
      }
      case LayerKind::kConv2D: {
        const ParamBlock& p = net_.layers[block_index_[i]];
        const TensorShape& si = shapes_[i];
        const TensorShape& so = shapes_[i + 1];
        for (int y = 0; y < so.height; ++y) {
          for (int x = 0; x < so.width; ++x) {
            double* cell = out.data() + (static_cast<size_t>(y) * so.width + x) * layer.c_out;
            for (int co = 0; co < layer.c_out; ++co) cell[co] = p.bias[co];
            for (int a = 0; a < layer.k1; ++a) {
              for (int b = 0; b < layer.k2; ++b) {
                const double* pixel =
                    in.data() + (static_cast<size_t>(y + a) * si.width + (x + b)) * layer.c_in;
                const double* kern = p.weights.data() +
                    static_cast<size_t>(a * layer.k2 + b) * layer.c_in * layer.c_out;
                for (int ci = 0; ci < layer.c_in; ++ci) {
                  const double v = pixel[ci];
                  const double* k = kern + static_cast<size_t>(ci) * layer.c_out;
                  for (int co = 0; co < layer.c_out; ++co) cell[co] += v * k[co];
                }
              }
            }
          }
        }
        break;
      }
    }
  }

  void BackStep(int i, int label, std::vector<ParamBlock>& grad) {
    const LayerSpec& layer = net_.arch[i];
    const std::vector<double>& in = acts_[i];
    const std::vector<double>& d_out = deltas_[i + 1];
    std::vector<double>& d_in = deltas_[i];
    switch (layer.kind) {
      case LayerKind::kInput:
      case LayerKind::kFlatten:
        std::copy(d_out.begin(), d_out.end(), d_in.begin());
        break;
      case LayerKind::kRelu:
        for (size_t k = 0; k < in.size(); ++k) d_in[k] = in[k] > 0 ? d_out[k] : 0;
        break;
      case LayerKind::kSigmoidOutput:
        d_in[0] = acts_[i + 1][0] - label;
        break;
      case LayerKind::kDense: {
        const ParamBlock& p = net_.layers[block_index_[i]];
        ParamBlock& g = grad[block_index_[i]];
        std::fill(d_in.begin(), d_in.end(), 0.0);
        for (int o = 0; o < layer.out; ++o) {
          const double d = d_out[o];
          if (d == 0.0) continue;
          const size_t base = static_cast<size_t>(o) * layer.in;
          g.bias[o] += d;
          for (int j = 0; j < layer.in; ++j) {
            g.weights[base + j] += d * in[j];
            d_in[j] += p.weights[base + j] * d;
          }
        }
        break;
      }
      case LayerKind::kConv2D: {
        const ParamBlock& p = net_.layers[block_index_[i]];
        ParamBlock& g = grad[block_index_[i]];
        const TensorShape& si = shapes_[i];
        const TensorShape& so = shapes_[i + 1];
        std::fill(d_in.begin(), d_in.end(), 0.0);
        for (int y = 0; y < so.height; ++y) {
          for (int x = 0; x < so.width; ++x) {
            const double* cell =
                d_out.data() + (static_cast<size_t>(y) * so.width + x) * layer.c_out;
            for (int co = 0; co < layer.c_out; ++co) g.bias[co] += cell[co];
            for (int a = 0; a < layer.k1; ++a) {
              for (int b = 0; b < layer.k2; ++b) {
                const size_t pixel_base =
                    (static_cast<size_t>(y + a) * si.width + (x + b)) * layer.c_in;
                const size_t kern_base =
                    static_cast<size_t>(a * layer.k2 + b) * layer.c_in * layer.c_out;
                for (int ci = 0; ci < layer.c_in; ++ci) {
                  const double v = in[pixel_base + ci];
                  const size_t k = kern_base + static_cast<size_t>(ci) * layer.c_out;
                  double back = 0.0;
                  for (int co = 0; co < layer.c_out; ++co) {
                    g.weights[k + co] += v * cell[co];
                    back += p.weights[k + co] * cell[co];
                  }
                  d_in[pixel_base + ci] += back;
                }
              }
            }
          }
        }
        break;
      }
    }
  }

  const NetParams& net_;
  std::vector<TensorShape> shapes_;
  std::vector<std::vector<double>> acts_;
  std::vector<std::vector<double>> deltas_;
  std::vector<int> block_index_;
};

absl::StatusOr<Evaluator> MakeEvaluator(const NetParams& net) {
  DISTINF_ASSIGN_OR_RETURN(std::vector<TensorShape> shapes,
                           ResolveShapes(net.arch));
  return Evaluator(net, std::move(shapes));
}

absl::Status CheckInput(const NetParams& net, std::span<const double> x) {
  DISTINF_ASSIGN_OR_RETURN(const int expected, InputSize(net.arch));
  if (static_cast<int>(x.size()) != expected) {
    return MakeError(ErrorKind::kShapeMismatch,
                     absl::StrFormat("input has %d values, network expects %d",
                                     x.size(), expected));
  }
  return absl::OkStatus();
}

absl::Status CheckDataset(const NetParams& net, const Dataset& data) {
  if (data.records.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "dataset is empty");
  }
  DISTINF_ASSIGN_OR_RETURN(const int expected, InputSize(net.arch));
  for (const Record& r : data.records) {
    if (static_cast<int>(r.features.size()) != expected) {
      return MakeError(ErrorKind::kShapeMismatch,
                       absl::StrFormat("record has %d features, network "
                                       "expects %d",
                                       r.features.size(), expected));
    }
  }
  return absl::OkStatus();
}

bool AllFinite(const std::vector<ParamBlock>& blocks) {
  for (const ParamBlock& b : blocks) {
    for (const double w : b.weights) {
      if (!std::isfinite(w)) return false;
    }
    for (const double v : b.bias) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

}  // namespace

LayerSpec LayerSpec::Input(int height, int width, int channels) {
  LayerSpec s;
  s.kind = LayerKind::kInput;
  s.k1 = height;
  s.k2 = width;
  s.c_in = channels;
  return s;
}

LayerSpec LayerSpec::Dense(int in, int out) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.in = in;
  s.out = out;
  return s;
}

LayerSpec LayerSpec::Conv2D(int k1, int k2, int c_in, int c_out) {
  LayerSpec s;
  s.kind = LayerKind::kConv2D;
  s.k1 = k1;
  s.k2 = k2;
  s.c_in = c_in;
  s.c_out = c_out;
  return s;
}

LayerSpec LayerSpec::Relu() {
  LayerSpec s;
  s.kind = LayerKind::kRelu;
  return s;
}

LayerSpec LayerSpec::Flatten() {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  return s;
}

LayerSpec LayerSpec::SigmoidOutput() {
  LayerSpec s;
  s.kind = LayerKind::kSigmoidOutput;
  return s;
}

int LayerSpec::weight_count() const {
  switch (kind) {
    case LayerKind::kDense:
      return in * out;
    case LayerKind::kConv2D:
      return k1 * k2 * c_in * c_out;
    default:
      return 0;
  }
}

int LayerSpec::bias_count() const {
  switch (kind) {
    case LayerKind::kDense:
      return out;
    case LayerKind::kConv2D:
      return c_out;
    default:
      return 0;
  }
}

absl::StatusOr<std::vector<TensorShape>> ResolveShapes(const Architecture& arch) {
  if (arch.empty()) return Incompatible(0, "empty architecture");
  std::vector<TensorShape> shapes;
  TensorShape current;
  const LayerSpec& first = arch.front();
  switch (first.kind) {
    case LayerKind::kInput:
      if (first.k1 < 1 || first.k2 < 1 || first.c_in < 1) {
        return Incompatible(0, "input dimensions must be positive");
      }
      current = {first.k1, first.k2, first.c_in, true};
      break;
    case LayerKind::kDense:
      current = {1, 1, first.in, false};
      break;
    default:
      return Incompatible(0, "must start with Input or Dense");
  }
  shapes.push_back(current);

  for (size_t i = 0; i < arch.size(); ++i) {
    const LayerSpec& layer = arch[i];
    const int idx = static_cast<int>(i);
    switch (layer.kind) {
      case LayerKind::kInput:
        if (i != 0) return Incompatible(idx, "Input must be the first layer");
        break;
      case LayerKind::kDense:
        if (layer.in < 1 || layer.out < 1) {
          return Incompatible(idx, "dense dimensions must be positive");
        }
        if (current.spatial) return Incompatible(idx, "dense needs Flatten");
        if (current.size() != layer.in) {
          return Incompatible(idx, absl::StrFormat("dense expects %d inputs, "
                                                   "previous layer gives %d",
                                                   layer.in, current.size()));
        }
        current = {1, 1, layer.out, false};
        break;
      case LayerKind::kConv2D:
        if (layer.k1 < 1 || layer.k2 < 1 || layer.c_in < 1 || layer.c_out < 1) {
          return Incompatible(idx, "conv dimensions must be positive");
        }
        if (!current.spatial) return Incompatible(idx, "conv needs spatial input");
        if (current.channels != layer.c_in) {
          return Incompatible(idx, "conv input channels do not match");
        }
        if (current.height < layer.k1 || current.width < layer.k2) {
          return Incompatible(idx, "kernel larger than input");
        }
        current = {current.height - layer.k1 + 1, current.width - layer.k2 + 1,
                   layer.c_out, true};
        break;
      case LayerKind::kRelu:
        break;
      case LayerKind::kFlatten:
        current = {1, 1, current.size(), false};
        break;
      case LayerKind::kSigmoidOutput:
        if (i + 1 != arch.size()) {
          return Incompatible(idx, "SigmoidOutput must be last");
        }
        if (current.spatial || current.size() != 1) {
          return Incompatible(idx, "SigmoidOutput needs a single logit");
        }
        break;
    }
    shapes.push_back(current);
  }
  if (arch.back().kind != LayerKind::kSigmoidOutput) {
    return Incompatible(static_cast<int>(arch.size()) - 1,
                        "network must end with SigmoidOutput");
  }
  return shapes;
}

absl::StatusOr<int> InputSize(const Architecture& arch) {
  DISTINF_ASSIGN_OR_RETURN(const std::vector<TensorShape> shapes,
                           ResolveShapes(arch));
  return shapes.front().size();
}

std::vector<int> ReluLayerIndices(const Architecture& arch) {
  std::vector<int> out;
  for (size_t i = 0; i < arch.size(); ++i) {
    if (arch[i].kind == LayerKind::kRelu) out.push_back(static_cast<int>(i));
  }
  return out;
}

absl::Status ValidateNet(const NetParams& net) {
  DISTINF_RETURN_IF_ERROR(ResolveShapes(net.arch).status());
  size_t block = 0;
  for (const LayerSpec& layer : net.arch) {
    if (!layer.has_params()) continue;
    if (block >= net.layers.size()) {
      return MakeError(ErrorKind::kShapeMismatch, "missing parameter block");
    }
    const ParamBlock& p = net.layers[block++];
    if (static_cast<int>(p.weights.size()) != layer.weight_count() ||
        static_cast<int>(p.bias.size()) != layer.bias_count()) {
      return MakeError(ErrorKind::kShapeMismatch,
                       absl::StrFormat("block %d has %d weights / %d biases, "
                                       "expected %d / %d",
                                       block - 1, p.weights.size(),
                                       p.bias.size(), layer.weight_count(),
                                       layer.bias_count()));
    }
  }
  if (block != net.layers.size()) {
    return MakeError(ErrorKind::kShapeMismatch, "extra parameter blocks");
  }
  if (!AllFinite(net.layers)) {
    return MakeError(ErrorKind::kShapeMismatch, "non-finite parameter");
  }
  return absl::OkStatus();
}

absl::Status ValidateTrainConfig(const TrainConfig& cfg) {
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0) ||
      !(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "need epochs >= 0, batch_size >= 1, learning_rate > 0, "
                     "momentum in [0, 1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<NetParams> InitNet(const Architecture& arch, uint64_t seed) {
  DISTINF_RETURN_IF_ERROR(ResolveShapes(arch).status());
  Rng rng(MixSeed({seed, Tag(StreamTag::kInit)}));
  NetParams net;
  net.arch = arch;
  for (const LayerSpec& layer : arch) {
    if (!layer.has_params()) continue;
    const int fan_in = layer.kind == LayerKind::kDense
                           ? layer.in
                           : layer.k1 * layer.k2 * layer.c_in;
    const double limit = std::sqrt(6.0 / fan_in);
    ParamBlock block;
    block.weights.resize(layer.weight_count());
    for (double& w : block.weights) w = rng.Uniform(-limit, limit);
    block.bias.assign(layer.bias_count(), 0.0);
    net.layers.push_back(std::move(block));
  }
  return net;
}

double BinaryCrossEntropy(double probability, int label) {
  const double p =
      std::clamp(probability, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

std::vector<ParamBlock> ZeroGradients(const NetParams& net) {
  std::vector<ParamBlock> grad(net.layers.size());
  for (size_t b = 0; b < net.layers.size(); ++b) {
    grad[b].weights.assign(net.layers[b].weights.size(), 0.0);
    grad[b].bias.assign(net.layers[b].bias.size(), 0.0);
  }
  return grad;
}

absl::StatusOr<double> Forward(const NetParams& net, std::span<const double> x) {
  DISTINF_RETURN_IF_ERROR(CheckInput(net, x));
  DISTINF_ASSIGN_OR_RETURN(Evaluator eval, MakeEvaluator(net));
  return eval.Probability(x);
}

absl::StatusOr<double> AccumulateGradient(const NetParams& net,
                                          std::span<const double> x, int label,
                                          std::vector<ParamBlock>& grad) {
  DISTINF_RETURN_IF_ERROR(CheckInput(net, x));
  DISTINF_ASSIGN_OR_RETURN(Evaluator eval, MakeEvaluator(net));
  const double p = eval.Probability(x);
  eval.Backward(label, grad);
  return BinaryCrossEntropy(p, label);
}

absl::StatusOr<NetParams> Train(const NetParams& net, const Dataset& data,
                                const TrainConfig& cfg) {
  DISTINF_RETURN_IF_ERROR(ValidateNet(net));
  DISTINF_RETURN_IF_ERROR(ValidateTrainConfig(cfg));
  DISTINF_RETURN_IF_ERROR(CheckDataset(net, data));

  NetParams trained = net;
  DISTINF_ASSIGN_OR_RETURN(Evaluator eval, MakeEvaluator(trained));
  std::vector<ParamBlock> grad = ZeroGradients(trained);
  std::vector<ParamBlock> velocity = ZeroGradients(trained);
  std::vector<size_t> order(data.records.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(MixSeed({cfg.seed, Tag(StreamTag::kShuffle),
                     static_cast<uint64_t>(epoch)}));
    rng.Shuffle(std::span<size_t>(order));

    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      for (ParamBlock& g : grad) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
      }
      for (size_t k = start; k < end; ++k) {
        const Record& r = data.records[order[k]];
        eval.Probability(r.features);
        eval.Backward(r.label, grad);
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - start);
      for (size_t b = 0; b < trained.layers.size(); ++b) {
        auto update = [&](std::vector<double>& param, std::vector<double>& vel,
                          const std::vector<double>& g) {
          for (size_t i = 0; i < param.size(); ++i) {
            vel[i] = cfg.momentum * vel[i] - scale * g[i];
            param[i] += vel[i];
          }
        };
        update(trained.layers[b].weights, velocity[b].weights, grad[b].weights);
        update(trained.layers[b].bias, velocity[b].bias, grad[b].bias);
      }
      if (!AllFinite(trained.layers)) {
        return MakeError(ErrorKind::kNumericalDivergence,
                         absl::StrFormat("non-finite parameter at epoch %d, "
                                         "batch starting %d (lr=%g)",
                                         epoch, start, cfg.learning_rate));
      }
    }
  }
  return trained;
}

absl::StatusOr<double> Accuracy(const NetParams& net, const Dataset& data) {
  DISTINF_RETURN_IF_ERROR(CheckDataset(net, data));
  DISTINF_ASSIGN_OR_RETURN(Evaluator eval, MakeEvaluator(net));
  int64_t correct = 0;
  for (const Record& r : data.records) {
    const int predicted = eval.Probability(r.features) >= 0.5 ? 1 : 0;
    if (predicted == r.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.records.size());
}

absl::StatusOr<std::vector<double>> Activations(const NetParams& net,
                                                std::span<const double> x,
                                                int layer_index) {
  if (layer_index < 0 || layer_index >= static_cast<int>(net.arch.size()) ||
      net.arch[layer_index].kind != LayerKind::kRelu) {
    return MakeError(ErrorKind::kBadLayerIndex,
                     absl::StrFormat("layer %d is not a Relu layer",
                                     layer_index));
  }
  DISTINF_RETURN_IF_ERROR(CheckInput(net, x));
  DISTINF_ASSIGN_OR_RETURN(Evaluator eval, MakeEvaluator(net));
  return eval.Run(x, layer_index);
}

}  // namespace distinf
