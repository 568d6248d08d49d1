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


#include "distinf/meta_classifier.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"
#include "distinf/random.h"
#include "distinf/status.h"

namespace distinf {
namespace {

Mlp MakeMlp(int in, int hidden, int out) {
  Mlp m;
  m.in = in;
  m.hidden = hidden;
  m.out = out;
  m.w1.assign(static_cast<size_t>(hidden) * in, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(static_cast<size_t>(out) * hidden, 0.0);
  m.b2.assign(out, 0.0);
  return m;
}

void RandomizeMlp(Rng& rng, Mlp& m) {
  const double l1 = std::sqrt(6.0 / m.in);
  const double l2 = std::sqrt(6.0 / m.hidden);
  for (double& w : m.w1) w = rng.Uniform(-l1, l1);
  for (double& w : m.w2) w = rng.Uniform(-l2, l2);
}

Mlp ZeroLike(const Mlp& m) { return MakeMlp(m.in, m.hidden, m.out); }

template <typename Fn>
void ForEachBuffer(Mlp& m, Fn fn) {
  fn(m.w1);
  fn(m.b1);
  fn(m.w2);
  fn(m.b2);
}

template <typename Fn>
void ForEachBuffer(const Mlp& m, Fn fn) {
  fn(m.w1);
  fn(m.b1);
  fn(m.w2);
  fn(m.b2);
}

// Intermediate values of one Mlp evaluation.
struct MlpTrace {
  std::vector<double> pre;     // W1 x + b1
  std::vector<double> hidden;  // relu(pre)
};

void MlpForwardInto(const Mlp& m, std::span<const double> x, MlpTrace& trace,
                    std::span<double> y) {
  trace.pre.resize(m.hidden);
  trace.hidden.resize(m.hidden);
  for (int h = 0; h < m.hidden; ++h) {
    const double* row = m.w1.data() + static_cast<size_t>(h) * m.in;
    double acc = m.b1[h];
    for (int j = 0; j < m.in; ++j) acc += row[j] * x[j];
    trace.pre[h] = acc;
    trace.hidden[h] = acc > 0 ? acc : 0;
  }
  for (int o = 0; o < m.out; ++o) {
    const double* row = m.w2.data() + static_cast<size_t>(o) * m.hidden;
    double acc = m.b2[o];
    for (int h = 0; h < m.hidden; ++h) acc += row[h] * trace.hidden[h];
    y[o] = acc;
  }
}

// Accumulates parameter gradients into `g`; adds d(loss)/dx into `dx` when
// it is nonempty.
void MlpBackward(const Mlp& m, std::span<const double> x, const MlpTrace& trace,
                 std::span<const double> dy, Mlp& g, std::span<double> dx) {
  std::vector<double> dpre(m.hidden, 0.0);
  for (int o = 0; o < m.out; ++o) {
    const double d = dy[o];
    g.b2[o] += d;
    const size_t base = static_cast<size_t>(o) * m.hidden;
    for (int h = 0; h < m.hidden; ++h) {
      g.w2[base + h] += d * trace.hidden[h];
      dpre[h] += m.w2[base + h] * d;
    }
  }
  for (int h = 0; h < m.hidden; ++h) {
    if (trace.pre[h] <= 0) continue;
    const double d = dpre[h];
    g.b1[h] += d;
    const size_t base = static_cast<size_t>(h) * m.in;
    for (int j = 0; j < m.in; ++j) g.w1[base + j] += d * x[j];
    if (!dx.empty()) {
      for (int j = 0; j < m.in; ++j) dx[j] += m.w1[base + j] * d;
    }
  }
}

bool RowLess(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct LayerTrace {
  std::vector<std::vector<double>> inputs;  // sorted, standardized, with L_{i-1}
  std::vector<MlpTrace> traces;
  std::vector<double> rep;  // L_i
};

struct ModelTrace {
  std::vector<LayerTrace> layers;
  std::vector<double> features;
  MlpTrace head;
  double output = 0.0;
};

// Parameterized layers of the signature, in order.
std::vector<LayerSpec> ParamLayers(const Architecture& arch) {
  std::vector<LayerSpec> out;
  for (const LayerSpec& l : arch) {
    if (l.has_params()) out.push_back(l);
  }
  return out;
}

int RawWidth(const LayerSpec& layer) {
  return layer.kind == LayerKind::kDense ? layer.in + 1
                                         : layer.k1 * layer.k2 * layer.c_in + 1;
}

absl::Status CheckSignature(const MetaNet& meta, const NetParams& net) {
  if (net.arch != meta.signature) {
    return MakeError(ErrorKind::kArchMismatch,
                     "model architecture differs from the meta-classifier's "
                     "signature");
  }
  if (net.layers.size() != meta.phi.size()) {
    return MakeError(ErrorKind::kArchMismatch, "parameter block count differs");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::vector<std::vector<double>>>> SortedRawRows(
    const NetParams& net) {
  std::vector<std::vector<std::vector<double>>> out;
  size_t block = 0;
  for (const LayerSpec& layer : net.arch) {
    if (!layer.has_params()) continue;
    DISTINF_ASSIGN_OR_RETURN(auto rows, LayerRows(layer, net.layers[block++]));
    std::sort(rows.begin(), rows.end(), RowLess);
    out.push_back(std::move(rows));
  }
  return out;
}

absl::StatusOr<ModelTrace> Trace(const MetaNet& meta, const NetParams& net) {
  DISTINF_RETURN_IF_ERROR(CheckSignature(meta, net));
  DISTINF_ASSIGN_OR_RETURN(const auto raw, SortedRawRows(net));
  ModelTrace t;
  t.layers.resize(meta.phi.size());
  std::vector<double> prev;
  for (size_t i = 0; i < meta.phi.size(); ++i) {
    const Mlp& phi = meta.phi[i];
    const ColumnStats& st = meta.stats[i];
    LayerTrace& lt = t.layers[i];
    lt.rep.assign(phi.out, 0.0);
    lt.inputs.resize(raw[i].size());
    lt.traces.resize(raw[i].size());
    std::vector<double> y(phi.out);
    for (size_t r = 0; r < raw[i].size(); ++r) {
      std::vector<double>& x = lt.inputs[r];
      x.resize(raw[i][r].size());
      for (size_t c = 0; c < x.size(); ++c) {
        x[c] = (raw[i][r][c] - st.mean[c]) * st.inv_scale[c];
      }
      x.insert(x.end(), prev.begin(), prev.end());
      MlpForwardInto(phi, x, lt.traces[r], y);
      for (int o = 0; o < phi.out; ++o) lt.rep[o] += y[o];
    }
    t.features.insert(t.features.end(), lt.rep.begin(), lt.rep.end());
    prev = lt.rep;
  }
  double out = 0.0;
  MlpForwardInto(meta.rho, t.features, t.head, std::span<double>(&out, 1));
  t.output = out;
  return t;
}

double SigmoidOf(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Loss and d(loss)/d(output) for one example.
std::pair<double, double> OutputLoss(MetaMode mode, double output,
                                     double target) {
  if (mode == MetaMode::kBinary) {
    const double p = SigmoidOf(output);
    return {BinaryCrossEntropy(p, static_cast<int>(target)), p - target};
  }
  const double e = output - target;
  return {e * e, 2.0 * e};
}

struct MetaGrad {
  std::vector<Mlp> phi;
  Mlp rho;
};

MetaGrad ZeroGrad(const MetaNet& meta) {
  MetaGrad g;
  for (const Mlp& m : meta.phi) g.phi.push_back(ZeroLike(m));
  g.rho = ZeroLike(meta.rho);
  return g;
}

void Backprop(const MetaNet& meta, const ModelTrace& t, double d_output,
              MetaGrad& g) {
  std::vector<double> d_features(t.features.size(), 0.0);
  MlpBackward(meta.rho, t.features, t.head, std::span<const double>(&d_output, 1),
              g.rho, d_features);
  const int latent = meta.cfg.latent;
  // d_rep holds dLoss/dL_i while walking down the layers.
  std::vector<double> d_rep(d_features.end() - latent, d_features.end());
  for (size_t i = meta.phi.size(); i-- > 0;) {
    const Mlp& phi = meta.phi[i];
    const LayerTrace& lt = t.layers[i];
    const bool has_prev = i > 0;
    std::vector<double> d_prev;
    if (has_prev) {
      d_prev.assign(d_features.begin() + static_cast<ptrdiff_t>(i - 1) * latent,
                    d_features.begin() + static_cast<ptrdiff_t>(i) * latent);
    }
    std::vector<double> dx(phi.in);
    for (size_t r = 0; r < lt.inputs.size(); ++r) {
      std::fill(dx.begin(), dx.end(), 0.0);
      MlpBackward(phi, lt.inputs[r], lt.traces[r], d_rep, g.phi[i],
                  has_prev ? std::span<double>(dx) : std::span<double>());
      if (has_prev) {
        const size_t offset = phi.in - latent;
        for (int k = 0; k < latent; ++k) d_prev[k] += dx[offset + k];
      }
    }
    d_rep = std::move(d_prev);
  }
}

std::vector<double> Flatten(const std::vector<Mlp>& phi, const Mlp& rho) {
  std::vector<double> flat;
  auto append = [&flat](const std::vector<double>& v) {
    flat.insert(flat.end(), v.begin(), v.end());
  };
  for (const Mlp& m : phi) ForEachBuffer(m, append);
  ForEachBuffer(rho, append);
  return flat;
}

ColumnStats FitStats(const std::vector<std::vector<double>>& rows, int width) {
  ColumnStats st;
  st.mean.assign(width, 0.0);
  st.inv_scale.assign(width, 1.0);
  if (rows.empty()) return st;
  for (const auto& r : rows) {
    for (int c = 0; c < width; ++c) st.mean[c] += r[c];
  }
  for (double& m : st.mean) m /= static_cast<double>(rows.size());
  for (int c = 0; c < width; ++c) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[c] - st.mean[c]) * (r[c] - st.mean[c]);
    const double sd = std::sqrt(ss / static_cast<double>(rows.size()));
    st.inv_scale[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return st;
}

}  // namespace

absl::Status ValidateMetaConfig(const MetaConfig& cfg) {
  if (cfg.latent < 1 || cfg.head_hidden < 1 || cfg.epochs < 0 ||
      cfg.batch_size < 1 || !(cfg.learning_rate > 0) ||
      !(cfg.momentum >= 0 && cfg.momentum < 1) || !(cfg.weight_decay >= 0) ||
      !(cfg.clip_norm >= 0)) {
    return MakeError(ErrorKind::kConfigError, "invalid meta-classifier config");
  }
  return absl::OkStatus();
}

std::vector<double> MlpForward(const Mlp& mlp, std::span<const double> x) {
  MlpTrace trace;
  std::vector<double> y(mlp.out);
  MlpForwardInto(mlp, x, trace, y);
  return y;
}

absl::StatusOr<MetaNet> InitMetaNet(const Architecture& signature,
                                    MetaMode mode, const MetaConfig& cfg,
                                    uint64_t seed) {
  DISTINF_RETURN_IF_ERROR(ValidateMetaConfig(cfg));
  DISTINF_RETURN_IF_ERROR(ResolveShapes(signature).status());
  Rng rng(MixSeed({seed, Tag(StreamTag::kMeta)}));
  MetaNet meta;
  meta.mode = mode;
  meta.signature = signature;
  meta.cfg = cfg;
  const std::vector<LayerSpec> layers = ParamLayers(signature);
  for (size_t i = 0; i < layers.size(); ++i) {
    const int raw = RawWidth(layers[i]);
    const int in = raw + (i > 0 ? cfg.latent : 0);
    Mlp phi = MakeMlp(in, cfg.latent, cfg.latent);
    RandomizeMlp(rng, phi);
    meta.phi.push_back(std::move(phi));
    meta.stats.push_back({std::vector<double>(raw, 0.0),
                          std::vector<double>(raw, 1.0)});
  }
  meta.rho = MakeMlp(cfg.latent * static_cast<int>(layers.size()),
                     cfg.head_hidden, 1);
  RandomizeMlp(rng, meta.rho);
  return meta;
}

absl::StatusOr<std::vector<double>> LayerRepresentation(
    const Mlp& phi, std::span<const std::vector<double>> rows) {
  std::vector<const std::vector<double>*> sorted;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != phi.in) {
      return MakeError(ErrorKind::kShapeMismatch,
                       absl::StrFormat("row width %d, phi expects %d", r.size(),
                                       phi.in));
    }
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return RowLess(*a, *b); });
  std::vector<double> rep(phi.out, 0.0);
  MlpTrace trace;
  std::vector<double> y(phi.out);
  for (const auto* r : sorted) {
    MlpForwardInto(phi, *r, trace, y);
    for (int o = 0; o < phi.out; ++o) rep[o] += y[o];
  }
  return rep;
}

absl::StatusOr<std::vector<double>> FeaturizeModel(const MetaNet& meta,
                                                   const NetParams& net) {
  DISTINF_ASSIGN_OR_RETURN(ModelTrace t, Trace(meta, net));
  return std::move(t.features);
}

absl::StatusOr<double> MetaPredict(const MetaNet& meta, const NetParams& net) {
  DISTINF_ASSIGN_OR_RETURN(const ModelTrace t, Trace(meta, net));
  return meta.mode == MetaMode::kBinary ? SigmoidOf(t.output) : t.output;
}

std::vector<double> FlattenMetaParams(const MetaNet& meta) {
  return Flatten(meta.phi, meta.rho);
}

absl::Status UnflattenMetaParams(std::span<const double> flat, MetaNet& meta) {
  size_t expected = 0;
  auto count = [&expected](const std::vector<double>& v) {
    expected += v.size();
  };
  for (const Mlp& m : meta.phi) ForEachBuffer(m, count);
  ForEachBuffer(meta.rho, count);
  if (flat.size() != expected) {
    return MakeError(ErrorKind::kShapeMismatch,
                     absl::StrFormat("expected %d parameters, got %d", expected,
                                     flat.size()));
  }
  size_t pos = 0;
  auto fill = [&](std::vector<double>& v) {
    std::copy(flat.begin() + pos, flat.begin() + pos + v.size(), v.begin());
    pos += v.size();
  };
  for (Mlp& m : meta.phi) ForEachBuffer(m, fill);
  ForEachBuffer(meta.rho, fill);
  return absl::OkStatus();
}

absl::StatusOr<MetaLossGradient> MetaLossAndGradient(const MetaNet& meta,
                                                     const NetParams& net,
                                                     double target) {
  DISTINF_ASSIGN_OR_RETURN(const ModelTrace t, Trace(meta, net));
  const auto [loss, d_output] = OutputLoss(meta.mode, t.output, target);
  MetaGrad g = ZeroGrad(meta);
  Backprop(meta, t, d_output, g);
  return MetaLossGradient{loss, Flatten(g.phi, g.rho)};
}

absl::StatusOr<MetaNet> MetaTrain(const ShadowPool& pool, MetaMode mode,
                                  const MetaConfig& cfg, uint64_t seed) {
  const bool binary = mode == MetaMode::kBinary;
  if (binary) {
    DISTINF_RETURN_IF_ERROR(ValidateShadowPool(pool, /*need_both_labels=*/true));
  } else {
    if (pool.models.empty()) {
      return MakeError(ErrorKind::kInvalidArgument, "shadow pool is empty");
    }
    if (pool.alpha_labels.size() != pool.models.size()) {
      return MakeError(ErrorKind::kMissingLabel,
                       "regression training needs one alpha label per model");
    }
  }
  DISTINF_ASSIGN_OR_RETURN(
      MetaNet meta, InitMetaNet(pool.models.front().arch, mode, cfg, seed));

  // Standardization statistics over every row of every pool model.
  std::vector<std::vector<std::vector<double>>> all_rows(meta.phi.size());
  for (const NetParams& net : pool.models) {
    DISTINF_RETURN_IF_ERROR(CheckSignature(meta, net));
    DISTINF_ASSIGN_OR_RETURN(auto raw, SortedRawRows(net));
    for (size_t i = 0; i < raw.size(); ++i) {
      for (auto& r : raw[i]) all_rows[i].push_back(std::move(r));
    }
  }
  for (size_t i = 0; i < meta.phi.size(); ++i) {
    meta.stats[i] =
        FitStats(all_rows[i], static_cast<int>(meta.stats[i].mean.size()));
  }

  std::vector<double> targets(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) {
    targets[i] = binary ? pool.dist_labels[i] : pool.alpha_labels[i];
  }

  std::vector<double> params = FlattenMetaParams(meta);
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad(params.size());
  std::vector<size_t> order(pool.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(MixSeed({seed, Tag(StreamTag::kShuffle),
                     static_cast<uint64_t>(epoch)}));
    rng.Shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (size_t k = start; k < end; ++k) {
        DISTINF_ASSIGN_OR_RETURN(
            const MetaLossGradient lg,
            MetaLossAndGradient(meta, pool.models[order[k]], targets[order[k]]));
        for (size_t p = 0; p < grad.size(); ++p) grad[p] += lg.gradient[p];
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      double norm2 = 0.0;
      for (size_t p = 0; p < grad.size(); ++p) {
        grad[p] = grad[p] * inv + cfg.weight_decay * params[p];
        norm2 += grad[p] * grad[p];
      }
      const double norm = std::sqrt(norm2);
      const double clip =
          cfg.clip_norm > 0 && norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;
      for (size_t p = 0; p < params.size(); ++p) {
        velocity[p] = cfg.momentum * velocity[p] - cfg.learning_rate * clip * grad[p];
        params[p] += velocity[p];
      }
      if (!std::isfinite(norm)) {
        return MakeError(ErrorKind::kNumericalDivergence,
                         absl::StrFormat("meta-classifier gradient became "
                                         "non-finite at epoch %d",
                                         epoch));
      }
      DISTINF_RETURN_IF_ERROR(UnflattenMetaParams(params, meta));
    }
  }
  return meta;
}

}  // namespace distinf
