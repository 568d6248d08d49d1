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


#include "distinf/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "distinf/attacks.h"
#include "distinf/leakage.h"
#include "distinf/oracle.h"
#include "distinf/random.h"
#include "distinf/status.h"

namespace distinf {
namespace {

uint64_t RoleTag(Role role) {
  return Tag(role == Role::kVictim ? StreamTag::kVictimPool
                                   : StreamTag::kAdversaryPool);
}

// Accuracy of every model on `data`.
absl::StatusOr<std::vector<double>> PoolAccuracies(
    const std::vector<const NetParams*>& models, const Dataset& data,
    int workers) {
  std::vector<absl::StatusOr<double>> out(models.size(), 0.0);
  ParallelFor(models.size(), workers,
              [&](size_t i) { out[i] = Accuracy(*models[i], data); });
  std::vector<double> accs;
  for (auto& a : out) {
    if (!a.ok()) return a.status();
    accs.push_back(*a);
  }
  return accs;
}

std::vector<const NetParams*> Concat(const ModelPool& a, const ModelPool& b) {
  std::vector<const NetParams*> out;
  for (const NetParams& m : a.models) out.push_back(&m);
  for (const NetParams& m : b.models) out.push_back(&m);
  return out;
}

std::vector<int> ClassLabels(size_t n0, size_t n1) {
  std::vector<int> y(n0, 0);
  y.insert(y.end(), n1, 1);
  return y;
}

absl::StatusOr<PairReport> Score(const RatioPair& pair, AttackMode attack,
                                 int rep, const std::vector<int>& predictions,
                                 const std::vector<int>& truths) {
  DISTINF_ASSIGN_OR_RETURN(const AttackTally tally,
                           McAttackAccuracy(predictions, truths));
  PairReport r;
  r.alpha0 = pair.alpha0;
  r.alpha1 = pair.alpha1;
  r.attack = attack;
  r.rep = rep;
  r.accuracy = tally.accuracy;
  r.advantage = tally.advantage().value_or(0.0);
  r.n_eval = tally.total;
  if (r.accuracy < 0.5) {
    r.below_chance = true;
    r.n_leaked = 0.0;
  } else {
    DISTINF_ASSIGN_OR_RETURN(r.n_leaked, NLeakedBinary<double>(pair, r.accuracy));
  }
  return r;
}

}  // namespace

void ParallelFor(size_t n, int workers, const std::function<void(size_t)>& fn) {
  const size_t threads = std::min<size_t>(std::max(workers, 1), n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

absl::StatusOr<ModelPool> BuildPool(const ExperimentConfig& cfg,
                                    size_t alpha_index, Role role, int rep) {
  if (alpha_index >= cfg.alpha_grid.size()) {
    return MakeError(ErrorKind::kConfigError, "alpha index out of range");
  }
  const int count = role == Role::kVictim ? cfg.n_victim : cfg.n_shadow;
  ModelPool pool;
  pool.alpha = cfg.alpha_grid[alpha_index];
  pool.role = role;
  pool.rep = rep;
  pool.models.resize(count);
  pool.datasets.resize(count);
  pool.seeds.resize(count);
  const RatioDistributionSpec spec{cfg.underlying, pool.alpha};
  std::vector<absl::Status> status(count);
  ParallelFor(count, cfg.workers, [&](size_t k) {
    const uint64_t seed =
        MixSeed({cfg.master_seed, RoleTag(role), alpha_index,
                 static_cast<uint64_t>(rep), k});
    pool.seeds[k] = seed;
    absl::StatusOr<Dataset> data = SampleDataset(
        spec, cfg.dataset_size, seed,
        role == Role::kVictim ? Pool::kVictim : Pool::kAdversary,
        SamplingMode::kExactCount);
    if (!data.ok()) {
      status[k] = data.status();
      return;
    }
    absl::StatusOr<NetParams> init = InitNet(cfg.arch, seed);
    if (!init.ok()) {
      status[k] = init.status();
      return;
    }
    TrainConfig train = cfg.train;
    train.seed = seed;
    absl::StatusOr<NetParams> net = Train(*init, *data, train);
    if (!net.ok()) {
      status[k] = net.status();
      return;
    }
    pool.models[k] = *std::move(net);
    pool.datasets[k] = *std::move(data);
  });
  for (const absl::Status& s : status) DISTINF_RETURN_IF_ERROR(s);
  return pool;
}

double BlindGuessMse(const std::vector<double>& grid) {
  if (grid.empty()) return 0.0;
  double mean = 0.0;
  for (const double a : grid) mean += a;
  mean /= static_cast<double>(grid.size());
  double mse = 0.0;
  for (const double a : grid) mse += (a - mean) * (a - mean);
  return mse / static_cast<double>(grid.size());
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {}

absl::StatusOr<size_t> Experiment::GridIndex(double alpha) const {
  for (size_t i = 0; i < cfg_.alpha_grid.size(); ++i) {
    if (cfg_.alpha_grid[i] == alpha) return i;
  }
  return MakeError(ErrorKind::kConfigError,
                   absl::StrFormat("alpha %g is not on the grid", alpha));
}

absl::StatusOr<const ModelPool*> Experiment::Pool(size_t alpha_index,
                                                  Role role, int rep) {
  const auto key = std::make_tuple(alpha_index, static_cast<int>(role), rep);
  auto it = pools_.find(key);
  if (it != pools_.end()) return it->second.get();
  DISTINF_ASSIGN_OR_RETURN(ModelPool pool,
                           BuildPool(cfg_, alpha_index, role, rep));
  auto owned = std::make_unique<ModelPool>(std::move(pool));
  const ModelPool* ptr = owned.get();
  pools_.emplace(key, std::move(owned));
  return ptr;
}

absl::StatusOr<const Dataset*> Experiment::TestSet(size_t alpha_index,
                                                   int rep) {
  const auto key = std::make_pair(alpha_index, rep);
  auto it = test_sets_.find(key);
  if (it != test_sets_.end()) return it->second.get();
  const RatioDistributionSpec spec{cfg_.underlying, cfg_.alpha_grid[alpha_index]};
  DISTINF_ASSIGN_OR_RETURN(
      Dataset data,
      SampleDataset(spec, cfg_.test_set_size,
                    MixSeed({cfg_.master_seed, Tag(StreamTag::kTestSet),
                             alpha_index, static_cast<uint64_t>(rep)}),
                    Pool::kAdversary, SamplingMode::kExactCount));
  auto owned = std::make_unique<Dataset>(std::move(data));
  const Dataset* ptr = owned.get();
  test_sets_.emplace(key, std::move(owned));
  return ptr;
}

absl::Status Experiment::CheckDisjoint(size_t alpha_index, int rep) {
  DISTINF_ASSIGN_OR_RETURN(const ModelPool* victims,
                           Pool(alpha_index, Role::kVictim, rep));
  DISTINF_ASSIGN_OR_RETURN(const ModelPool* shadows,
                           Pool(alpha_index, Role::kAdversary, rep));
  DISTINF_ASSIGN_OR_RETURN(const Dataset* test, TestSet(alpha_index, rep));
  std::vector<const Dataset*> a, b;
  for (const Dataset& d : victims->datasets) a.push_back(&d);
  for (const Dataset& d : shadows->datasets) b.push_back(&d);
  b.push_back(test);
  if (!CheckPoolDisjointness(a, b)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrFormat("victim and adversary data overlap at "
                                     "alpha %g",
                                     victims->alpha));
  }
  return absl::OkStatus();
}

absl::StatusOr<const MetaNet*> Experiment::RegressionMeta(int rep) {
  auto it = regression_meta_.find(rep);
  if (it != regression_meta_.end()) return it->second.get();
  ShadowPool pool;
  for (size_t a = 0; a < cfg_.alpha_grid.size(); ++a) {
    DISTINF_ASSIGN_OR_RETURN(const ModelPool* shadows,
                             Pool(a, Role::kAdversary, rep));
    for (const NetParams& m : shadows->models) {
      pool.models.push_back(m);
      pool.dist_labels.push_back(0);
      pool.alpha_labels.push_back(shadows->alpha);
    }
  }
  DISTINF_ASSIGN_OR_RETURN(
      MetaNet meta,
      MetaTrain(pool, MetaMode::kRegression, cfg_.meta,
                MixSeed({cfg_.master_seed, Tag(StreamTag::kMeta),
                         Tag(StreamTag::kRule), static_cast<uint64_t>(rep)})));
  auto owned = std::make_unique<MetaNet>(std::move(meta));
  const MetaNet* ptr = owned.get();
  regression_meta_.emplace(rep, std::move(owned));
  return ptr;
}

absl::StatusOr<RegressionSummary> Experiment::RegressionHoldout(int rep) {
  DISTINF_ASSIGN_OR_RETURN(const MetaNet* meta, RegressionMeta(rep));
  RegressionSummary s;
  s.rep = rep;
  s.blind_mse = BlindGuessMse(cfg_.alpha_grid);
  double total = 0.0;
  for (size_t a = 0; a < cfg_.alpha_grid.size(); ++a) {
    DISTINF_ASSIGN_OR_RETURN(const ModelPool* victims,
                             Pool(a, Role::kVictim, rep));
    double sq = 0.0;
    for (const NetParams& m : victims->models) {
      DISTINF_ASSIGN_OR_RETURN(const double pred, MetaPredict(*meta, m));
      s.predictions.push_back(pred);
      s.truths.push_back(victims->alpha);
      sq += (pred - victims->alpha) * (pred - victims->alpha);
    }
    total += sq;
    const double mse = sq / static_cast<double>(victims->models.size());
    s.alpha.push_back(victims->alpha);
    s.alpha_mse.push_back(mse);
    absl::StatusOr<double> n = NLeakedRegression(victims->alpha, mse);
    s.alpha_n_leaked.push_back(n.ok() ? *n
                                      : std::numeric_limits<double>::quiet_NaN());
  }
  s.mse = total / static_cast<double>(s.predictions.size());
  return s;
}

absl::StatusOr<std::vector<PairReport>> Experiment::RunPair(double alpha0,
                                                            double alpha1,
                                                            int rep) {
  DISTINF_RETURN_IF_ERROR(ValidateExperimentConfig(cfg_));
  DISTINF_ASSIGN_OR_RETURN(const size_t i0, GridIndex(alpha0));
  DISTINF_ASSIGN_OR_RETURN(const size_t i1, GridIndex(alpha1));
  const bool same = i0 == i1;
  if (same) {
    for (const AttackMode a : cfg_.attacks) {
      if (IsBinaryAttack(a)) {
        return MakeError(ErrorKind::kConfigError,
                         absl::StrFormat("attack %s needs alpha0 != alpha1",
                                         AttackModeName(a)));
      }
    }
  }
  const RatioPair pair{alpha0, alpha1};

  DISTINF_ASSIGN_OR_RETURN(const ModelPool* v0, Pool(i0, Role::kVictim, rep));
  DISTINF_ASSIGN_OR_RETURN(const ModelPool* v1, Pool(i1, Role::kVictim, rep));
  DISTINF_RETURN_IF_ERROR(CheckDisjoint(i0, rep));
  DISTINF_RETURN_IF_ERROR(CheckDisjoint(i1, rep));
  const std::vector<const NetParams*> victims =
      same ? Concat(*v0, ModelPool{}) : Concat(*v0, *v1);
  const std::vector<int> truths =
      same ? ClassLabels(v0->models.size(), 0)
           : ClassLabels(v0->models.size(), v1->models.size());

  std::vector<PairReport> reports;
  for (const AttackMode attack : cfg_.attacks) {
    auto run = [&]() -> absl::StatusOr<PairReport> {
      std::vector<int> predictions(victims.size());
      switch (attack) {
        case AttackMode::kLoss: {
          DISTINF_ASSIGN_OR_RETURN(const Dataset* s0, TestSet(i0, rep));
          DISTINF_ASSIGN_OR_RETURN(const Dataset* s1, TestSet(i1, rep));
          DISTINF_ASSIGN_OR_RETURN(const auto acc0,
                                   PoolAccuracies(victims, *s0, cfg_.workers));
          DISTINF_ASSIGN_OR_RETURN(const auto acc1,
                                   PoolAccuracies(victims, *s1, cfg_.workers));
          for (size_t i = 0; i < victims.size(); ++i) {
            predictions[i] = LossTest(acc0[i], acc1[i]).prediction;
          }
          break;
        }
        case AttackMode::kThreshold: {
          DISTINF_ASSIGN_OR_RETURN(const Dataset* s0, TestSet(i0, rep));
          DISTINF_ASSIGN_OR_RETURN(const Dataset* s1, TestSet(i1, rep));
          DISTINF_ASSIGN_OR_RETURN(const ModelPool* a0,
                                   Pool(i0, Role::kAdversary, rep));
          DISTINF_ASSIGN_OR_RETURN(const ModelPool* a1,
                                   Pool(i1, Role::kAdversary, rep));
          const auto shadows = Concat(*a0, *a1);
          DISTINF_ASSIGN_OR_RETURN(const auto sh0,
                                   PoolAccuracies(shadows, *s0, cfg_.workers));
          DISTINF_ASSIGN_OR_RETURN(const auto sh1,
                                   PoolAccuracies(shadows, *s1, cfg_.workers));
          DISTINF_ASSIGN_OR_RETURN(
              const AttackRule rule,
              ThresholdFit(ClassLabels(a0->models.size(), a1->models.size()),
                           sh0, sh1));
          DISTINF_ASSIGN_OR_RETURN(
              const auto accs,
              PoolAccuracies(victims, rule.chosen_set == 0 ? *s0 : *s1,
                             cfg_.workers));
          for (size_t i = 0; i < victims.size(); ++i) {
            predictions[i] = ThresholdApply(rule, accs[i]);
          }
          break;
        }
        case AttackMode::kMeta: {
          DISTINF_ASSIGN_OR_RETURN(const ModelPool* a0,
                                   Pool(i0, Role::kAdversary, rep));
          DISTINF_ASSIGN_OR_RETURN(const ModelPool* a1,
                                   Pool(i1, Role::kAdversary, rep));
          ShadowPool shadow;
          shadow.models = a0->models;
          shadow.models.insert(shadow.models.end(), a1->models.begin(),
                               a1->models.end());
          shadow.dist_labels =
              ClassLabels(a0->models.size(), a1->models.size());
          DISTINF_ASSIGN_OR_RETURN(
              const MetaNet meta,
              MetaTrain(shadow, MetaMode::kBinary, cfg_.meta,
                        MixSeed({cfg_.master_seed, Tag(StreamTag::kMeta), i0,
                                 i1, static_cast<uint64_t>(rep)})));
          for (size_t i = 0; i < victims.size(); ++i) {
            DISTINF_ASSIGN_OR_RETURN(const double p,
                                     MetaPredict(meta, *victims[i]));
            predictions[i] = p >= 0.5 ? 1 : 0;
          }
          break;
        }
        case AttackMode::kMetaRegress: {
          DISTINF_ASSIGN_OR_RETURN(const MetaNet* meta, RegressionMeta(rep));
          double sq = 0.0;
          for (size_t i = 0; i < victims.size(); ++i) {
            DISTINF_ASSIGN_OR_RETURN(const double pred,
                                     MetaPredict(*meta, *victims[i]));
            const double truth = truths[i] == 0 ? alpha0 : alpha1;
            sq += (pred - truth) * (pred - truth);
            if (!same) {
              DISTINF_ASSIGN_OR_RETURN(predictions[i],
                                       RegressionToBinary(pred, pair));
            }
          }
          const double mse = sq / static_cast<double>(victims.size());
          if (same) {
            PairReport r;
            r.alpha0 = alpha0;
            r.alpha1 = alpha1;
            r.attack = attack;
            r.rep = rep;
            r.n_eval = static_cast<int64_t>(victims.size());
            r.mse = mse;
            absl::StatusOr<double> n = NLeakedRegression(alpha0, mse);
            r.n_leaked = n.ok() ? *n : 0.0;
            return r;
          }
          DISTINF_ASSIGN_OR_RETURN(PairReport r,
                                   Score(pair, attack, rep, predictions, truths));
          r.mse = mse;
          return r;
        }
        case AttackMode::kLayerRank: {
          DISTINF_ASSIGN_OR_RETURN(const ModelPool* a0,
                                   Pool(i0, Role::kAdversary, rep));
          DISTINF_ASSIGN_OR_RETURN(const ModelPool* a1,
                                   Pool(i1, Role::kAdversary, rep));
          DISTINF_ASSIGN_OR_RETURN(const Dataset* s0, TestSet(i0, rep));
          DISTINF_ASSIGN_OR_RETURN(const Dataset* s1, TestSet(i1, rep));
          // Even-indexed shadows fit, odd-indexed ones rank.
          ShadowPool fit, holdout;
          for (const auto* p : {a0, a1}) {
            for (size_t k = 0; k < p->models.size(); ++k) {
              ShadowPool& dst = k % 2 == 0 ? fit : holdout;
              dst.models.push_back(p->models[k]);
              dst.dist_labels.push_back(p == a0 ? 0 : 1);
            }
          }
          if (holdout.models.empty()) holdout = fit;
          std::vector<std::vector<double>> candidates;
          for (int c = 0; c < cfg_.layer_candidates; ++c) {
            const Dataset& src = c % 2 == 0 ? *s0 : *s1;
            candidates.push_back(src.records[(c / 2) % src.size()].features);
          }
          DISTINF_ASSIGN_OR_RETURN(const auto ranking,
                                   LayerRank(fit, candidates, holdout));
          const LayerScore& top = ranking.front();
          for (size_t i = 0; i < victims.size(); ++i) {
            DISTINF_ASSIGN_OR_RETURN(
                const int n, ActivationCount(*victims[i],
                                             candidates[top.candidate],
                                             top.layer_index));
            predictions[i] =
                ApplyThreshold(top.rule.threshold, top.rule.direction, n);
          }
          break;
        }
      }
      return Score(pair, attack, rep, predictions, truths);
    };
    absl::StatusOr<PairReport> r = run();
    if (r.ok()) {
      reports.push_back(*std::move(r));
    } else {
      PairReport failed;
      failed.alpha0 = alpha0;
      failed.alpha1 = alpha1;
      failed.attack = attack;
      failed.rep = rep;
      failed.error = std::string(r.status().message());
      reports.push_back(std::move(failed));
    }
  }
  return reports;
}

absl::StatusOr<SweepResult> Experiment::RunSweep() {
  DISTINF_RETURN_IF_ERROR(ValidateExperimentConfig(cfg_));
  SweepResult result;
  result.grid = cfg_.alpha_grid;
  result.attacks = cfg_.attacks;
  result.config_hash = ConfigHash(cfg_);
  result.dataset_size = cfg_.dataset_size;

  std::vector<std::pair<double, double>> pairs;
  const auto& g = cfg_.alpha_grid;
  for (size_t i = 0; i < g.size(); ++i) {
    for (size_t j = i + 1; j < g.size(); ++j) {
      if (cfg_.fixed_alpha0.has_value() && g[i] != *cfg_.fixed_alpha0 &&
          g[j] != *cfg_.fixed_alpha0) {
        continue;
      }
      pairs.emplace_back(std::min(g[i], g[j]), std::max(g[i], g[j]));
    }
  }
  if (pairs.empty()) {
    result.warnings.push_back("the grid yields no pairs with alpha0 != alpha1");
    return result;
  }

  for (int rep = 0; rep < cfg_.repetitions; ++rep) {
    for (const auto& [a0, a1] : pairs) {
      absl::StatusOr<std::vector<PairReport>> reports = RunPair(a0, a1, rep);
      if (reports.ok()) {
        for (PairReport& r : *reports) result.reports.push_back(std::move(r));
        continue;
      }
      for (const AttackMode attack : cfg_.attacks) {
        PairReport failed;
        failed.alpha0 = a0;
        failed.alpha1 = a1;
        failed.attack = attack;
        failed.rep = rep;
        failed.error = std::string(reports.status().message());
        result.reports.push_back(std::move(failed));
      }
    }
    if (std::find(cfg_.attacks.begin(), cfg_.attacks.end(),
                  AttackMode::kMetaRegress) != cfg_.attacks.end()) {
      absl::StatusOr<RegressionSummary> s = RegressionHoldout(rep);
      if (s.ok()) {
        result.regression.push_back(*std::move(s));
      } else {
        result.warnings.push_back(absl::StrCat("regression holdout, rep ", rep,
                                               ": ", s.status().message()));
      }
    }
  }
  return result;
}

absl::StatusOr<std::vector<PairReport>> RunPair(const ExperimentConfig& cfg,
                                                double alpha0, double alpha1,
                                                int rep) {
  Experiment e(cfg);
  return e.RunPair(alpha0, alpha1, rep);
}

absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& cfg) {
  Experiment e(cfg);
  return e.RunSweep();
}

}  // namespace distinf
