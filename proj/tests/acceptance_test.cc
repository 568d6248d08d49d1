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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. argv[1] is the path of the distinf binary.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "distinf/attacks.h"
#include "distinf/dataset_io.h"
#include "distinf/experiment_config.h"
#include "distinf/harness.h"
#include "distinf/high_precision.h"
#include "distinf/leakage.h"
#include "distinf/meta_classifier.h"
#include "distinf/nets.h"
#include "distinf/oracle.h"
#include "distinf/random.h"

namespace distinf {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<double> Grid(double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::lround(1.0 / step));
  for (int i = 0; i <= n; ++i) g.push_back(i * step);
  return g;
}

double BinomialSe(double p, double n) { return std::sqrt(p * (1 - p) / n); }

Outcome WorkedExample() {
  const double n = *NLeakedBinary<double>({0.5, 0.52}, 0.95);
  return {std::abs(n - 42.34) <= 0.05, absl::StrFormat("n_leaked = %.6f", n)};
}

Outcome RoundTrips() {
  double worst = 0.0;
  for (double a0 : Grid(0.1)) {
    for (double a1 : Grid(0.1)) {
      if (a0 == a1 || (std::min(a0, a1) == 0.0 && std::max(a0, a1) == 1.0)) {
        continue;
      }
      for (int n = 1; n <= 30; ++n) {
        const HighPrecision w = BinaryAccuracyBound<HighPrecision>({a0, a1}, n);
        const double back =
            static_cast<double>(*NLeakedBinary<HighPrecision>({a0, a1}, w));
        worst = std::max(worst, std::abs(back - n));
      }
    }
  }
  const std::vector<ZipfSpec> specs = {{5, 1.0},  {5, 2.0},  {10, 0.5},
                                       {10, 1.0}, {10, 2.0}, {20, 1.5},
                                       {50, 0.5}, {50, 1.2}};
  int degree_pairs = 0;
  for (const ZipfSpec& a : specs) {
    for (const ZipfSpec& b : specs) {
      if (a.n_elems > b.n_elems) continue;
      if (!NLeakedDegree<double>(a, b, 0.7).ok()) continue;
      ++degree_pairs;
      for (int n = 1; n <= 30; ++n) {
        const HighPrecision w = *ZipfAccuracyBound<HighPrecision>(a, b, n);
        const double back =
            static_cast<double>(*NLeakedDegree<HighPrecision>(a, b, w));
        worst = std::max(worst, std::abs(back - n));
      }
    }
  }
  return {worst <= 1e-9,
          absl::StrFormat("max |n' - n| = %.3g over binary grid and %d Zipf pairs",
                          worst, degree_pairs)};
}

Outcome Dominance() {
  double worst = -1.0;
  for (double a0 : Grid(0.05)) {
    for (double a1 : Grid(0.05)) {
      for (int n = 1; n <= 20; ++n) {
        const double gap = *ExactOptimalAccuracy({a0, a1}, n) -
                           BinaryAccuracyBound({a0, a1}, n);
        worst = std::max(worst, gap);
      }
    }
  }
  const std::vector<ZipfSpec> specs = {{4, 0.0}, {4, 1.0},  {6, 2.0},
                                       {8, 1.0}, {8, 1.5},  {12, 0.5},
                                       {12, 2.0}, {20, 1.0}};
  int pairs = 0, violations = 0;
  for (size_t i = 0; i < specs.size(); ++i) {
    for (size_t j = 0; j < specs.size(); ++j) {
      if (i == j || specs[i].n_elems > specs[j].n_elems) continue;
      const double bound = *ZipfAccuracyBound<double>(specs[i], specs[j], 3);
      const McEstimate mc =
          *McOptimalAccuracyZipf(specs[i], specs[j], 3, 20000, 100 + pairs);
      violations += mc.mean > bound + 3 * mc.std_error;
      ++pairs;
    }
  }
  return {worst <= 1e-12 && pairs >= 20 && violations == 0,
          absl::StrFormat("max exact - bound = %.3g; %d/%d Zipf pairs dominated",
                          worst, pairs - violations, pairs)};
}

Outcome RegressionIdentity() {
  double worst = 0.0;
  for (int k = 1; k <= 19; ++k) {
    const double a = 0.05 * k;
    for (int n = 1; n <= 64; ++n) {
      worst = std::max(worst, std::abs(*ExactRegressionMse(a, n) - a * (1 - a) / n));
    }
  }
  return {worst <= 1e-12, absl::StrFormat("max deviation %.3g", worst)};
}

double GradientError(const Architecture& arch, uint64_t seed) {
  NetParams net = *InitNet(arch, seed);
  Rng rng(seed + 7);
  for (ParamBlock& b : net.layers)
    for (double& v : b.bias) v = rng.Uniform(-0.5, 0.5);
  std::vector<double> x(*InputSize(arch));
  for (double& v : x) v = rng.Normal();
  double worst = 0.0;
  for (int y : {0, 1}) {
    std::vector<ParamBlock> grad = ZeroGradients(net);
    (void)AccumulateGradient(net, x, y, grad);
    for (size_t l = 0; l < net.layers.size(); ++l) {
      for (int part = 0; part < 2; ++part) {
        std::vector<double>& p = part ? net.layers[l].bias : net.layers[l].weights;
        const std::vector<double>& g = part ? grad[l].bias : grad[l].weights;
        for (size_t i = 0; i < p.size(); ++i) {
          const double keep = p[i];
          p[i] = keep + 1e-5;
          const double up = BinaryCrossEntropy(*Forward(net, x), y);
          p[i] = keep - 1e-5;
          const double down = BinaryCrossEntropy(*Forward(net, x), y);
          p[i] = keep;
          const double numeric = (up - down) / 2e-5;
          const double scale = std::max({std::abs(numeric), std::abs(g[i]), 1e-3});
          worst = std::max(worst, std::abs(numeric - g[i]) / scale);
        }
      }
    }
  }
  return worst;
}

Outcome GradientChecks() {
  const Architecture dense = {LayerSpec::Dense(5, 7), LayerSpec::Relu(),
                              LayerSpec::Dense(7, 4), LayerSpec::Relu(),
                              LayerSpec::Dense(4, 1), LayerSpec::SigmoidOutput()};
  const Architecture conv = {LayerSpec::Input(6, 5, 2), LayerSpec::Conv2D(3, 2, 2, 3),
                             LayerSpec::Relu(),         LayerSpec::Conv2D(2, 2, 3, 2),
                             LayerSpec::Relu(),         LayerSpec::Flatten(),
                             LayerSpec::Dense(18, 4),   LayerSpec::Relu(),
                             LayerSpec::Dense(4, 1),    LayerSpec::SigmoidOutput()};
  double worst = 0.0;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    worst = std::max(worst, GradientError(dense, seed));
    worst = std::max(worst, GradientError(conv, seed));
  }
  return {worst <= 1e-4, absl::StrFormat("max relative error %.3g", worst)};
}

void PermuteOutputs(NetParams& net, size_t block, const std::vector<int>& perm) {
  size_t seen = 0;
  const LayerSpec* spec = nullptr;
  for (const LayerSpec& s : net.arch) {
    if (s.has_params() && seen++ == block) spec = &s;
  }
  ParamBlock& b = net.layers[block];
  const ParamBlock old = b;
  const int outs = static_cast<int>(old.bias.size());
  for (int o = 0; o < outs; ++o) b.bias[o] = old.bias[perm[o]];
  if (spec->kind == LayerKind::kDense) {
    for (int o = 0; o < outs; ++o)
      for (int i = 0; i < spec->in; ++i)
        b.weights[o * spec->in + i] = old.weights[perm[o] * spec->in + i];
  } else {
    const int slices = spec->k1 * spec->k2 * spec->c_in;
    for (int s = 0; s < slices; ++s)
      for (int o = 0; o < outs; ++o)
        b.weights[s * outs + o] = old.weights[s * outs + perm[o]];
  }
}

Outcome PermutationInvariance() {
  const Architecture arch = {LayerSpec::Input(5, 5, 2), LayerSpec::Conv2D(2, 2, 2, 4),
                             LayerSpec::Relu(),         LayerSpec::Flatten(),
                             LayerSpec::Dense(64, 6),   LayerSpec::Relu(),
                             LayerSpec::Dense(6, 1),    LayerSpec::SigmoidOutput()};
  MetaConfig cfg;
  cfg.latent = 8;
  Rng rng(2024);
  int failures = 0;
  const int trials = 150;
  for (int t = 0; t < trials; ++t) {
    MetaNet meta = *InitMetaNet(arch, MetaMode::kBinary, cfg, t);
    std::vector<double> flat = FlattenMetaParams(meta);
    for (double& v : flat) v = rng.Uniform(-1, 1);
    (void)UnflattenMetaParams(flat, meta);
    NetParams net = *InitNet(arch, 5000 + t);
    for (ParamBlock& b : net.layers)
      for (double& v : b.bias) v = rng.Normal();
    const std::vector<double> before = *FeaturizeModel(meta, net);
    const size_t block = rng.UniformIndex(net.layers.size());
    std::vector<int> perm(net.layers[block].bias.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(std::span<int>(perm));
    PermuteOutputs(net, block, perm);
    failures += *FeaturizeModel(meta, net) != before;
  }
  return {failures == 0,
          absl::StrFormat("%d/%d trials bitwise invariant", trials - failures, trials)};
}

Outcome ThresholdOptimality() {
  Rng rng(31337);
  int failures = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const int n = 2 + static_cast<int>(rng.UniformIndex(49));
    std::vector<int> y(n);
    std::vector<double> s0(n), s1(n);
    for (int i = 0; i < n; ++i) y[i] = i < 2 ? i : rng.Bernoulli(0.5);
    for (int i = 0; i < n; ++i) {
      s0[i] = std::round((rng.Uniform() + 0.1 * y[i]) * 25) / 25;
      s1[i] = std::round((rng.Uniform() - 0.1 * y[i]) * 25) / 25;
    }
    const AttackRule rule = *ThresholdFit(y, s0, s1);
    const std::vector<double>& s = rule.chosen_set == 0 ? s0 : s1;
    std::vector<double> cuts = s;
    cuts.push_back(INFINITY);
    int64_t best = 0;
    for (double c : cuts) {
      int64_t correct = 0;
      for (int i = 0; i < n; ++i) correct += ApplyThreshold(c, rule.direction, s[i]) == y[i];
      best = std::max(best, correct);
    }
    failures += best != rule.train_correct;
  }
  return {failures == 0,
          absl::StrFormat("%d/%d pools match brute force", trials - failures, trials)};
}

ExperimentConfig DeskConfig() {
  ExperimentConfig cfg = DefaultExperimentConfig();
  cfg.repetitions = 3;
  return cfg;
}

ExperimentConfig NullConfig() {
  ExperimentConfig cfg = DeskConfig();
  cfg.underlying.signal_strength = 0.0;
  cfg.underlying.label_property_coupling = 0.0;
  cfg.alpha_grid = {0.0, 1.0};
  return cfg;
}

// Mean accuracy of the layer-ranking diagnostic on the extreme pair. Shown
// for reference; it ranks layers and is not one of the scored attacks.
double LayerRankExtreme() {
  ExperimentConfig cfg = DeskConfig();
  cfg.alpha_grid = {0.0, 1.0};
  cfg.attacks = {AttackMode::kLayerRank};
  const absl::StatusOr<SweepResult> r = RunSweep(cfg);
  if (!r.ok() || r->reports.empty()) return NAN;
  double sum = 0;
  for (const PairReport& p : r->reports) sum += p.accuracy;
  return sum / r->reports.size();
}

Outcome Behavior(const SweepResult& desk, const SweepResult& null) {
  std::vector<std::string> problems;
  // (a) extreme pair
  double worst_extreme = 1.0;
  for (const PairReport& r : desk.reports) {
    if (r.alpha0 == 0.0 && r.alpha1 == 1.0) {
      worst_extreme = std::min(worst_extreme, r.error ? 0.0 : r.accuracy);
    }
  }
  if (worst_extreme < 0.9) problems.push_back("extreme pair below 0.9");
  // (b) null pair
  double worst_null = 0.0;
  for (const PairReport& r : null.reports) {
    const double z = r.error ? INFINITY
                             : std::abs(r.accuracy - 0.5) / BinomialSe(0.5, r.n_eval);
    worst_null = std::max(worst_null, z);
  }
  if (worst_null > 3.0) problems.push_back("null pair outside 3 sigma");
  // (c) meta trend at alpha0 = 0.5
  std::map<double, std::pair<double, int>> trend;
  for (const PairReport& r : desk.reports) {
    if (r.attack != AttackMode::kMeta || r.alpha0 != 0.5 || r.error) continue;
    trend[r.alpha1].first += r.accuracy * r.n_eval;
    trend[r.alpha1].second += r.n_eval;
  }
  std::string trend_text;
  double prev = -1, prev_se = 0;
  bool monotone = trend.size() == 5;
  for (const auto& [a1, sum] : trend) {
    const double mean = sum.first / sum.second;
    const double se = BinomialSe(mean, sum.second);
    absl::StrAppendFormat(&trend_text, "%s%.3f", trend_text.empty() ? "" : " ", mean);
    if (prev >= 0 && mean < prev - std::hypot(se, prev_se)) monotone = false;
    prev = mean;
    prev_se = se;
  }
  if (!monotone) problems.push_back("meta trend not monotone");
  return {problems.empty(),
          absl::StrFormat("(a) min extreme omega %.3f; (b) max null |z| %.2f; "
                          "(c) meta trend %s; layer-rank diagnostic at (0, 1) "
                          "%.3f, unscored%s",
                          worst_extreme, worst_null, trend_text, LayerRankExtreme(),
                          problems.empty() ? "" : absl::StrCat(" [", problems[0], "]"))};
}

Outcome RegressionVsBinary(const SweepResult& desk) {
  double meta_sum = 0, reg_sum = 0;
  int64_t meta_n = 0, reg_n = 0, meta_cells = 0;
  for (const PairReport& r : desk.reports) {
    if (r.error) continue;
    if (r.attack == AttackMode::kMeta) {
      meta_sum += r.accuracy * r.n_eval;
      meta_n += r.n_eval;
      ++meta_cells;
    } else if (r.attack == AttackMode::kMetaRegress) {
      reg_sum += r.accuracy * r.n_eval;
      reg_n += r.n_eval;
    }
  }
  if (meta_n == 0 || reg_n == 0) return {false, "missing meta reports"};
  const double meta = meta_sum / meta_n, reg = reg_sum / reg_n;
  const double sigma = BinomialSe(meta, meta_n);
  double mse = 0, blind = 0;
  for (const RegressionSummary& s : desk.regression) {
    mse += s.mse;
    blind += s.blind_mse;
  }
  mse /= desk.regression.size();
  blind /= desk.regression.size();
  const bool pass = reg >= meta - sigma && mse < blind && !desk.regression.empty();
  return {pass, absl::StrFormat("regression omega %.4f vs meta %.4f (sigma %.4f, "
                                "%d cells); held-out MSE %.4f vs blind %.4f",
                                reg, meta, sigma, meta_cells, mse, blind)};
}

Outcome BoundDominance(const std::vector<const SweepResult*>& sweeps) {
  int cells = 0, violations = 0;
  double worst = -1;
  for (const SweepResult* s : sweeps) {
    for (const PairReport& r : s->reports) {
      if (r.error || r.alpha0 == r.alpha1) continue;
      const double bound = BinaryAccuracyBound({r.alpha0, r.alpha1}, s->dataset_size);
      const double slack = 3 * BinomialSe(bound, r.n_eval);
      worst = std::max(worst, r.accuracy - bound - slack);
      violations += r.accuracy > bound + slack;
      ++cells;
    }
  }
  return {violations == 0 && cells > 0,
          absl::StrFormat("%d reports, %d above bound + 3 se (max excess %.4f)",
                          cells, violations, worst)};
}

std::map<std::string, std::string> ReadDir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files[entry.path().filename().string()] = *ReadFile(entry.path().string());
  }
  return files;
}

Outcome CliDeterminism(const std::string& cli) {
  const fs::path root =
      fs::temp_directory_path() / absl::StrCat("distinf_acceptance_", getpid());
  fs::create_directories(root);
  ExperimentConfig cfg = DefaultExperimentConfig();
  const std::string config_path = (root / "config.json").string();
  (void)WriteFile(config_path, ExperimentConfigToJson(cfg).dump(2));
  const std::string a = (root / "a").string(), b = (root / "b").string();
  const int rc1 = std::system(absl::StrCat("'", cli, "' sweep --config '", config_path,
                                           "' --out '", a, "' > /dev/null").c_str());
  const int rc2 = std::system(absl::StrCat("'", cli, "' sweep --config '", config_path,
                                           "' --out '", b, "' --workers 2 > /dev/null")
                                  .c_str());
  if (rc1 != 0 || rc2 != 0) {
    fs::remove_all(root);
    return {false, "sweep command failed"};
  }
  const auto fa = ReadDir(a), fb = ReadDir(b);
  fs::remove_all(root);
  return {fa == fb && fa.size() >= 3,
          absl::StrFormat("%d files compared, %s", fa.size(),
                          fa == fb ? "byte-identical" : "differ")};
}

}  // namespace
}  // namespace distinf

int main(int argc, char** argv) {
  using namespace distinf;
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance_test <path to distinf>\n");
    return 2;
  }
  int failed = 0;
  auto report = [&](int id, const Outcome& o) {
    std::printf("criterion %d: %s - %s\n", id, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  report(1, WorkedExample());
  report(2, RoundTrips());
  report(3, Dominance());
  report(4, RegressionIdentity());
  report(5, GradientChecks());
  report(6, PermutationInvariance());
  report(7, ThresholdOptimality());

  const absl::StatusOr<SweepResult> desk = RunSweep(DeskConfig());
  const absl::StatusOr<SweepResult> null = RunSweep(NullConfig());
  if (!desk.ok() || !null.ok()) {
    const std::string why = !desk.ok() ? std::string(desk.status().message())
                                       : std::string(null.status().message());
    for (int id : {8, 9, 10}) report(id, {false, "sweep failed: " + why});
  } else {
    report(8, Behavior(*desk, *null));
    report(9, RegressionVsBinary(*desk));
    report(10, BoundDominance({&*desk, &*null}));
  }
  report(11, CliDeterminism(argv[1]));
  return failed == 0 ? 0 : 1;
}
