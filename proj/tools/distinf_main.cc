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


// distinf: command-line front end. Run `distinf --help` or see README.md.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "distinf/attacks.h"
#include "distinf/dataset_io.h"
#include "distinf/experiment_config.h"
#include "distinf/harness.h"
#include "distinf/leakage.h"
#include "distinf/meta_classifier.h"
#include "distinf/nets_io.h"
#include "distinf/oracle.h"
#include "distinf/report.h"
#include "distinf/status.h"
#include "json.hpp"

namespace distinf {
namespace {

using nlohmann::json;

int Fail(const absl::Status& status) {
  std::fprintf(stderr, "distinf: %s\n", std::string(status.message()).c_str());
  return 1;
}

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.6f", v);
}

absl::StatusOr<std::pair<ZipfSpec, ZipfSpec>> ParseZipf(const std::string& text) {
  const std::vector<std::string> parts = absl::StrSplit(text, ',');
  ZipfSpec a, b;
  if (parts.size() != 4 || !absl::SimpleAtoi(parts[0], &a.n_elems) ||
      !absl::SimpleAtod(parts[1], &a.exponent) ||
      !absl::SimpleAtoi(parts[2], &b.n_elems) ||
      !absl::SimpleAtod(parts[3], &b.exponent)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "--zipf expects N0,S0,N1,S1");
  }
  return std::make_pair(a, b);
}

// Model files of a directory (*.json), in name order.
absl::StatusOr<std::vector<NetParams>> LoadModels(const std::string& dir) {
  std::vector<std::string> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  }
  if (ec) return absl::NotFoundError(absl::StrCat("cannot list ", dir));
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("no model files in ", dir));
  }
  std::vector<NetParams> models;
  for (const std::string& p : paths) {
    DISTINF_ASSIGN_OR_RETURN(NetParams net, ReadNetFile(p));
    models.push_back(std::move(net));
  }
  return models;
}

absl::Status EmitJson(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::fputs(text.c_str(), stdout);
    return absl::OkStatus();
  }
  return WriteFile(out, text);
}

struct AttackArgs {
  std::string mode;
  std::string shadow0, shadow1, victims0, victims1;
  std::string test0, test1;
  double alpha0 = 0.0, alpha1 = 1.0;
  uint64_t seed = 0;
  int candidates = 32;
  std::string out;
};

absl::Status RunAttack(const AttackArgs& args) {
  DISTINF_ASSIGN_OR_RETURN(const AttackMode mode, ParseAttackMode(args.mode));
  const RatioPair pair{args.alpha0, args.alpha1};
  DISTINF_RETURN_IF_ERROR(ValidateRatioPair(pair));
  DISTINF_ASSIGN_OR_RETURN(const auto v0, LoadModels(args.victims0));
  DISTINF_ASSIGN_OR_RETURN(const auto v1, LoadModels(args.victims1));
  std::vector<const NetParams*> victims;
  std::vector<int> truths;
  for (const auto& m : v0) {
    victims.push_back(&m);
    truths.push_back(0);
  }
  for (const auto& m : v1) {
    victims.push_back(&m);
    truths.push_back(1);
  }
  auto load_shadows = [&]() -> absl::StatusOr<ShadowPool> {
    DISTINF_ASSIGN_OR_RETURN(const auto s0, LoadModels(args.shadow0));
    DISTINF_ASSIGN_OR_RETURN(const auto s1, LoadModels(args.shadow1));
    ShadowPool pool;
    for (const auto& m : s0) {
      pool.models.push_back(m);
      pool.dist_labels.push_back(0);
      pool.alpha_labels.push_back(args.alpha0);
    }
    for (const auto& m : s1) {
      pool.models.push_back(m);
      pool.dist_labels.push_back(1);
      pool.alpha_labels.push_back(args.alpha1);
    }
    return pool;
  };
  auto accuracies = [](const std::vector<const NetParams*>& models,
                       const Dataset& data) -> absl::StatusOr<std::vector<double>> {
    std::vector<double> out;
    for (const NetParams* m : models) {
      DISTINF_ASSIGN_OR_RETURN(const double a, Accuracy(*m, data));
      out.push_back(a);
    }
    return out;
  };

  std::vector<int> predictions(victims.size());
  json extra;
  switch (mode) {
    case AttackMode::kLoss: {
      DISTINF_ASSIGN_OR_RETURN(const Dataset s0, ReadDatasetFile(args.test0));
      DISTINF_ASSIGN_OR_RETURN(const Dataset s1, ReadDatasetFile(args.test1));
      DISTINF_ASSIGN_OR_RETURN(const auto a0, accuracies(victims, s0));
      DISTINF_ASSIGN_OR_RETURN(const auto a1, accuracies(victims, s1));
      for (size_t i = 0; i < victims.size(); ++i) {
        predictions[i] = LossTest(a0[i], a1[i]).prediction;
      }
      break;
    }
    case AttackMode::kThreshold: {
      DISTINF_ASSIGN_OR_RETURN(const Dataset s0, ReadDatasetFile(args.test0));
      DISTINF_ASSIGN_OR_RETURN(const Dataset s1, ReadDatasetFile(args.test1));
      DISTINF_ASSIGN_OR_RETURN(const ShadowPool pool, load_shadows());
      std::vector<const NetParams*> shadows;
      for (const auto& m : pool.models) shadows.push_back(&m);
      DISTINF_ASSIGN_OR_RETURN(const auto sh0, accuracies(shadows, s0));
      DISTINF_ASSIGN_OR_RETURN(const auto sh1, accuracies(shadows, s1));
      DISTINF_ASSIGN_OR_RETURN(const AttackRule rule,
                               ThresholdFit(pool.dist_labels, sh0, sh1));
      DISTINF_ASSIGN_OR_RETURN(
          const auto accs, accuracies(victims, rule.chosen_set == 0 ? s0 : s1));
      for (size_t i = 0; i < victims.size(); ++i) {
        predictions[i] = ThresholdApply(rule, accs[i]);
      }
      extra = {{"chosen_set", rule.chosen_set},
               {"threshold", rule.threshold},
               {"direction", std::string(DirectionName(rule.direction))},
               {"gamma0", rule.gamma0},
               {"gamma1", rule.gamma1},
               {"tie", rule.tie}};
      break;
    }
    case AttackMode::kMeta:
    case AttackMode::kMetaRegress: {
      DISTINF_ASSIGN_OR_RETURN(const ShadowPool pool, load_shadows());
      const MetaMode meta_mode = mode == AttackMode::kMeta
                                     ? MetaMode::kBinary
                                     : MetaMode::kRegression;
      DISTINF_ASSIGN_OR_RETURN(const MetaNet meta,
                               MetaTrain(pool, meta_mode, MetaConfig{}, args.seed));
      double sq = 0.0;
      for (size_t i = 0; i < victims.size(); ++i) {
        DISTINF_ASSIGN_OR_RETURN(const double p, MetaPredict(meta, *victims[i]));
        if (meta_mode == MetaMode::kBinary) {
          predictions[i] = p >= 0.5 ? 1 : 0;
        } else {
          const double truth = truths[i] == 0 ? args.alpha0 : args.alpha1;
          sq += (p - truth) * (p - truth);
          DISTINF_ASSIGN_OR_RETURN(predictions[i], RegressionToBinary(p, pair));
        }
      }
      if (meta_mode == MetaMode::kRegression) {
        extra = {{"mse", sq / static_cast<double>(victims.size())}};
      }
      break;
    }
    case AttackMode::kLayerRank: {
      DISTINF_ASSIGN_OR_RETURN(const Dataset s0, ReadDatasetFile(args.test0));
      DISTINF_ASSIGN_OR_RETURN(const Dataset s1, ReadDatasetFile(args.test1));
      DISTINF_ASSIGN_OR_RETURN(const ShadowPool pool, load_shadows());
      ShadowPool fit, holdout;
      for (size_t k = 0; k < pool.size(); ++k) {
        ShadowPool& dst = k % 2 == 0 ? fit : holdout;
        dst.models.push_back(pool.models[k]);
        dst.dist_labels.push_back(pool.dist_labels[k]);
      }
      std::vector<std::vector<double>> candidates;
      for (int c = 0; c < args.candidates; ++c) {
        const Dataset& src = c % 2 == 0 ? s0 : s1;
        candidates.push_back(src.records[(c / 2) % src.size()].features);
      }
      DISTINF_ASSIGN_OR_RETURN(const auto ranking,
                               LayerRank(fit, candidates, holdout));
      json layers = json::array();
      for (const LayerScore& s : ranking) {
        layers.push_back({{"layer", s.layer_index},
                          {"holdout_accuracy", s.holdout_accuracy}});
      }
      extra = {{"ranking", layers}};
      const LayerScore& top = ranking.front();
      for (size_t i = 0; i < victims.size(); ++i) {
        DISTINF_ASSIGN_OR_RETURN(
            const int n, ActivationCount(*victims[i], candidates[top.candidate],
                                         top.layer_index));
        predictions[i] = ApplyThreshold(top.rule.threshold, top.rule.direction, n);
      }
      break;
    }
  }
  DISTINF_ASSIGN_OR_RETURN(const AttackTally tally,
                           McAttackAccuracy(predictions, truths));
  double n_leaked = 0.0;
  const bool below = tally.accuracy < 0.5;
  if (!below) {
    DISTINF_ASSIGN_OR_RETURN(n_leaked, NLeakedBinary<double>(pair, tally.accuracy));
  }
  json doc = {{"attack", args.mode},
              {"alpha0", args.alpha0},
              {"alpha1", args.alpha1},
              {"accuracy", tally.accuracy},
              {"advantage", tally.advantage().value_or(0.0)},
              {"n_leaked", JsonNumber(n_leaked)},
              {"below_chance", below},
              {"n_eval", tally.total}};
  if (!extra.is_null()) doc["details"] = extra;
  return EmitJson(doc, args.out);
}

}  // namespace
}  // namespace distinf

int main(int argc, char** argv) {
  using namespace distinf;
  CLI::App app{"Distribution inference leakage toolkit"};
  app.require_subcommand(1);

  // nleaked
  double nl_a0 = 0, nl_a1 = 0, nl_omega = 0.5, nl_mse = 0;
  auto* nleaked = app.add_subcommand("nleaked", "samples leaked for an observed accuracy or MSE");
  nleaked->add_option("--alpha0", nl_a0, "first ratio (the ratio itself with --mse)")->required();
  nleaked->add_option("--alpha1", nl_a1, "second ratio");
  auto* nl_omega_opt = nleaked->add_option("--omega", nl_omega, "distinguishing accuracy");
  auto* nl_mse_opt = nleaked->add_option("--mse", nl_mse, "regression mean squared error");
  nl_omega_opt->excludes(nl_mse_opt);

  // bound
  double b_a0 = 0, b_a1 = 0;
  int64_t b_n = 1;
  std::string b_zipf;
  auto* bound = app.add_subcommand("bound", "accuracy upper bound from n samples");
  bound->add_option("--alpha0", b_a0, "first ratio");
  bound->add_option("--alpha1", b_a1, "second ratio");
  bound->add_option("--n", b_n, "sample count")->required();
  bound->add_option("--zipf", b_zipf, "degree specs N0,S0,N1,S1");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact or Monte Carlo optimal tests");
  oracle->require_subcommand(1);
  double o_a0 = 0, o_a1 = 0, o_alpha = 0.5;
  int64_t o_n = 1, o_trials = 100000;
  uint64_t o_seed = 0;
  int o_workers = 1;
  std::string o_zipf;
  auto* o_bin = oracle->add_subcommand("binary", "exact optimal accuracy");
  o_bin->add_option("--alpha0", o_a0)->required();
  o_bin->add_option("--alpha1", o_a1)->required();
  o_bin->add_option("--n", o_n)->required();
  auto* o_reg = oracle->add_subcommand("regress", "exact MSE of the count estimator");
  o_reg->add_option("--alpha", o_alpha)->required();
  o_reg->add_option("--n", o_n)->required();
  auto* o_zipf_cmd = oracle->add_subcommand("zipf", "Monte Carlo likelihood-ratio accuracy");
  o_zipf_cmd->add_option("--zipf", o_zipf, "N0,S0,N1,S1")->required();
  o_zipf_cmd->add_option("--n", o_n)->required();
  o_zipf_cmd->add_option("--trials", o_trials);
  o_zipf_cmd->add_option("--seed", o_seed);
  o_zipf_cmd->add_option("--workers", o_workers);

  // gen
  UnderlyingSpec g_spec;
  double g_alpha = 0.5;
  int64_t g_m = 500;
  uint64_t g_seed = 0;
  std::string g_pool = "victim", g_mode = "iid", g_out;
  auto* gen = app.add_subcommand("gen", "sample a dataset");
  gen->add_option("--alpha", g_alpha)->required();
  gen->add_option("--m", g_m);
  gen->add_option("--seed", g_seed);
  gen->add_option("--pool", g_pool)->check(CLI::IsMember({"victim", "adversary"}));
  gen->add_option("--mode", g_mode)->check(CLI::IsMember({"iid", "exact"}));
  gen->add_option("--noise-dims", g_spec.noise_dims);
  gen->add_option("--signal-dims", g_spec.signal_dims);
  gen->add_option("--signal-strength", g_spec.signal_strength);
  gen->add_option("--coupling", g_spec.label_property_coupling);
  gen->add_option("--rule-seed", g_spec.rule_seed);
  gen->add_option("--out", g_out, "output path; .bin selects the binary container")->required();

  // train-pool
  std::string tp_config, tp_role = "victim", tp_out;
  double tp_alpha = 0.5;
  int tp_rep = 0;
  auto* train_pool = app.add_subcommand("train-pool", "train a model pool from a sweep config");
  train_pool->add_option("--config", tp_config)->required();
  train_pool->add_option("--alpha", tp_alpha, "a grid value of the config")->required();
  train_pool->add_option("--role", tp_role)->check(CLI::IsMember({"victim", "adversary"}));
  train_pool->add_option("--rep", tp_rep);
  train_pool->add_option("--out", tp_out, "directory for model_NNN.json")->required();

  // attack
  AttackArgs at;
  auto* attack = app.add_subcommand("attack", "run one attack on model directories");
  attack->add_option("mode", at.mode, "loss|threshold|meta|meta-regress|layer-rank")->required();
  attack->add_option("--alpha0", at.alpha0);
  attack->add_option("--alpha1", at.alpha1);
  attack->add_option("--victims0", at.victims0)->required();
  attack->add_option("--victims1", at.victims1)->required();
  attack->add_option("--shadow0", at.shadow0);
  attack->add_option("--shadow1", at.shadow1);
  attack->add_option("--test0", at.test0, "adversary samples from the first distribution");
  attack->add_option("--test1", at.test1, "adversary samples from the second distribution");
  attack->add_option("--seed", at.seed);
  attack->add_option("--candidates", at.candidates);
  attack->add_option("--out", at.out, "report path (default stdout)");

  // sweep
  std::string sw_config, sw_out;
  int sw_workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a full grid sweep");
  sweep->add_option("--config", sw_config)->required();
  sweep->add_option("--out", sw_out, "overrides output_dir");
  sweep->add_option("--workers", sw_workers, "overrides workers");

  // report
  std::string rp_in, rp_out;
  auto* report = app.add_subcommand("report", "rebuild heatmaps and summary from reports.json");
  report->add_option("--in", rp_in)->required();
  report->add_option("--out", rp_out)->required();

  CLI11_PARSE(app, argc, argv);

  if (nleaked->parsed()) {
    if (nl_mse_opt->count() > 0) {
      absl::StatusOr<double> n = NLeakedRegression(nl_a0, nl_mse);
      if (!n.ok()) return Fail(n.status());
      std::printf("n_leaked_regression %s\n", Num(*n).c_str());
      return 0;
    }
    absl::StatusOr<double> n = NLeakedBinary<double>({nl_a0, nl_a1}, nl_omega);
    if (!n.ok()) return Fail(n.status());
    std::printf("n_leaked %s\n", Num(*n).c_str());
    return 0;
  }
  if (bound->parsed()) {
    if (!b_zipf.empty()) {
      auto specs = ParseZipf(b_zipf);
      if (!specs.ok()) return Fail(specs.status());
      auto v = ZipfAccuracyBound<double>(specs->first, specs->second, b_n);
      if (!v.ok()) return Fail(v.status());
      std::printf("bound %s\n", Num(*v).c_str());
      return 0;
    }
    if (absl::Status s = ValidateRatioPair({b_a0, b_a1}); !s.ok()) return Fail(s);
    if (b_n < 1) return Fail(MakeError(ErrorKind::kInvalidArgument, "--n must be >= 1"));
    std::printf("bound %s\n", Num(BinaryAccuracyBound<double>({b_a0, b_a1}, b_n)).c_str());
    return 0;
  }
  if (oracle->parsed()) {
    if (o_bin->parsed()) {
      auto v = ExactOptimalAccuracy({o_a0, o_a1}, o_n);
      if (!v.ok()) return Fail(v.status());
      std::printf("exact_optimal_accuracy %s\n", Num(*v).c_str());
    } else if (o_reg->parsed()) {
      auto v = ExactRegressionMse(o_alpha, o_n);
      if (!v.ok()) return Fail(v.status());
      std::printf("exact_regression_mse %s\n", Num(*v).c_str());
    } else {
      auto specs = ParseZipf(o_zipf);
      if (!specs.ok()) return Fail(specs.status());
      auto v = McOptimalAccuracyZipf(specs->first, specs->second, o_n, o_trials,
                                     o_seed, o_workers);
      if (!v.ok()) return Fail(v.status());
      std::printf("mc_optimal_accuracy %s std_error %s trials %lld\n",
                  Num(v->mean).c_str(), Num(v->std_error).c_str(),
                  static_cast<long long>(v->trials));
    }
    return 0;
  }
  if (gen->parsed()) {
    auto data = SampleDataset({g_spec, g_alpha}, g_m, g_seed,
                              g_pool == "victim" ? Pool::kVictim : Pool::kAdversary,
                              g_mode == "iid" ? SamplingMode::kIid
                                              : SamplingMode::kExactCount);
    if (!data.ok()) return Fail(data.status());
    const bool binary = std::filesystem::path(g_out).extension() == ".bin";
    absl::Status s = WriteFile(g_out, binary ? DatasetToBinary(*data)
                                             : DatasetToCsv(*data));
    return s.ok() ? 0 : Fail(s);
  }
  if (train_pool->parsed()) {
    auto cfg = ReadExperimentConfig(tp_config);
    if (!cfg.ok()) return Fail(cfg.status());
    const auto it = std::find(cfg->alpha_grid.begin(), cfg->alpha_grid.end(), tp_alpha);
    if (it == cfg->alpha_grid.end()) {
      return Fail(MakeError(ErrorKind::kConfigError, "--alpha is not a grid value"));
    }
    auto pool = BuildPool(*cfg, static_cast<size_t>(it - cfg->alpha_grid.begin()),
                          tp_role == "victim" ? Role::kVictim : Role::kAdversary,
                          tp_rep);
    if (!pool.ok()) return Fail(pool.status());
    std::filesystem::create_directories(tp_out);
    for (size_t k = 0; k < pool->models.size(); ++k) {
      const std::string path =
          (std::filesystem::path(tp_out) / absl::StrFormat("model_%03d.json", k)).string();
      if (absl::Status s = WriteNetFile(path, pool->models[k]); !s.ok()) return Fail(s);
    }
    return 0;
  }
  if (attack->parsed()) {
    absl::Status s = RunAttack(at);
    return s.ok() ? 0 : Fail(s);
  }
  if (sweep->parsed()) {
    auto cfg = ReadExperimentConfig(sw_config);
    if (!cfg.ok()) return Fail(cfg.status());
    if (!sw_out.empty()) cfg->output_dir = sw_out;
    if (sw_workers > 0) cfg->workers = sw_workers;
    auto result = RunSweep(*cfg);
    if (!result.ok()) return Fail(result.status());
    for (const std::string& w : result->warnings) {
      std::fprintf(stderr, "distinf: warning: %s\n", w.c_str());
    }
    absl::Status s = WriteSweepOutputs(*result, cfg->output_dir);
    return s.ok() ? 0 : Fail(s);
  }
  if (report->parsed()) {
    auto text = ReadFile(rp_in);
    if (!text.ok()) return Fail(text.status());
    const auto doc = nlohmann::json::parse(*text, nullptr, false);
    if (doc.is_discarded()) {
      return Fail(MakeError(ErrorKind::kMalformedDocument, "reports file is not JSON"));
    }
    auto result = SweepResultFromJson(doc);
    if (!result.ok()) return Fail(result.status());
    absl::Status s = WriteSweepOutputs(*result, rp_out);
    return s.ok() ? 0 : Fail(s);
  }
  return 0;
}
