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

#include <atomic>
#include <cmath>
#include <set>
#include <vector>

#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "distinf/experiment_config.h"
#include "distinf/leakage.h"
#include "distinf/report.h"
#include "distinf/status.h"
#include "gtest/gtest.h"

namespace distinf {
namespace {

ExperimentConfig TinyConfig() {
  ExperimentConfig cfg = DefaultExperimentConfig();
  cfg.alpha_grid = {0.0, 0.5, 1.0};
  cfg.dataset_size = 60;
  cfg.n_victim = 4;
  cfg.n_shadow = 4;
  cfg.test_set_size = 60;
  cfg.layer_candidates = 4;
  cfg.train.epochs = 2;
  cfg.meta.epochs = 3;
  cfg.attacks = {AttackMode::kLoss, AttackMode::kThreshold};
  return cfg;
}

TEST(ParallelForTest, EachIndexOnce) {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    ParallelFor(hits.size(), workers, [&](size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(BuildPoolTest, CardinalityDeterminismDisjointness) {
  const ExperimentConfig cfg = TinyConfig();
  const ModelPool v = *BuildPool(cfg, 1, Role::kVictim, 0);
  ASSERT_EQ(v.models.size(), 4u);
  EXPECT_EQ(std::set<uint64_t>(v.seeds.begin(), v.seeds.end()).size(), 4u);
  const ModelPool v2 = *BuildPool(cfg, 1, Role::kVictim, 0);
  EXPECT_EQ(v.models, v2.models);
  EXPECT_EQ(v.seeds, v2.seeds);
  const ModelPool a = *BuildPool(cfg, 1, Role::kAdversary, 0);
  EXPECT_EQ(a.models.size(), 4u);
  std::vector<const Dataset*> pv, pa;
  for (const Dataset& d : v.datasets) pv.push_back(&d);
  for (const Dataset& d : a.datasets) pa.push_back(&d);
  EXPECT_TRUE(CheckPoolDisjointness(pv, pa));
  for (const Dataset& d : v.datasets) EXPECT_EQ(EmpiricalRatio(d), 0.5);
  EXPECT_NE(BuildPool(cfg, 1, Role::kVictim, 1)->seeds, v.seeds);
}

TEST(RunPairTest, ModeGating) {
  ExperimentConfig cfg = TinyConfig();
  EXPECT_TRUE(HasErrorKind(RunPair(cfg, 0.5, 0.5, 0).status(),
                           ErrorKind::kConfigError));
  cfg.attacks = {AttackMode::kMetaRegress};
  const std::vector<PairReport> reports = *RunPair(cfg, 0.5, 0.5, 0);
  ASSERT_EQ(reports.size(), 1u);
  ASSERT_TRUE(reports[0].mse.has_value());
  EXPECT_GT(*reports[0].mse, 0.0);
  EXPECT_FALSE(RunPair(cfg, 0.4, 0.6, 0).ok());
}

TEST(RunPairTest, ReportsRecomputeLeakage) {
  ExperimentConfig cfg = TinyConfig();
  cfg.attacks = {AttackMode::kLoss, AttackMode::kThreshold, AttackMode::kMeta,
                 AttackMode::kMetaRegress, AttackMode::kLayerRank};
  const std::vector<PairReport> reports = *RunPair(cfg, 0.0, 1.0, 0);
  ASSERT_EQ(reports.size(), 5u);
  for (const PairReport& r : reports) {
    ASSERT_FALSE(r.error.has_value()) << *r.error;
    EXPECT_EQ(r.n_eval, 8);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    if (r.accuracy < 0.5) {
      EXPECT_TRUE(r.below_chance);
      EXPECT_EQ(r.n_leaked, 0.0);
    } else {
      EXPECT_EQ(r.n_leaked, *NLeakedBinary<double>({0.0, 1.0}, r.accuracy));
    }
  }
}

TEST(RunSweepTest, Combinatorics) {
  const SweepResult result = *RunSweep(TinyConfig());
  EXPECT_EQ(result.reports.size(), 6u);
  EXPECT_TRUE(result.warnings.empty());
  std::set<std::pair<double, double>> pairs;
  for (const PairReport& r : result.reports) {
    EXPECT_LT(r.alpha0, r.alpha1);
    pairs.insert({r.alpha0, r.alpha1});
  }
  EXPECT_EQ(pairs.size(), 3u);
}

TEST(RunSweepTest, FixedAlpha0) {
  ExperimentConfig cfg = TinyConfig();
  cfg.alpha_grid = {0.0, 0.25, 0.5, 1.0};
  cfg.fixed_alpha0 = 0.5;
  cfg.attacks = {AttackMode::kLoss};
  const SweepResult result = *RunSweep(cfg);
  ASSERT_EQ(result.reports.size(), 3u);
  for (const PairReport& r : result.reports) {
    EXPECT_TRUE(r.alpha0 == 0.5 || r.alpha1 == 0.5);
  }
}

TEST(RunSweepTest, SinglePointGridWarns) {
  ExperimentConfig cfg = TinyConfig();
  cfg.alpha_grid = {0.5};
  const SweepResult result = *RunSweep(cfg);
  EXPECT_TRUE(result.reports.empty());
  EXPECT_EQ(result.warnings.size(), 1u);
}

TEST(RunSweepTest, RepetitionsFillStd) {
  ExperimentConfig cfg = TinyConfig();
  cfg.alpha_grid = {0.0, 1.0};
  cfg.attacks = {AttackMode::kLoss};
  cfg.repetitions = 3;
  const std::vector<CellSummary> cells = AggregateCells(*RunSweep(cfg));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].count, 3);
  EXPECT_GE(cells[0].std_accuracy, 0.0);
}

TEST(RunSweepTest, WorkerCountDoesNotChangeOutput) {
  ExperimentConfig cfg = TinyConfig();
  cfg.attacks = {AttackMode::kLoss, AttackMode::kMeta, AttackMode::kMetaRegress};
  const SweepResult one = *RunSweep(cfg);
  cfg.workers = 3;
  const SweepResult three = *RunSweep(cfg);
  EXPECT_EQ(ReportsJson(one).dump(), ReportsJson(three).dump());
  EXPECT_EQ(SummaryJson(one).dump(), SummaryJson(three).dump());
}

TEST(HeatmapTest, ShapeAndRecompute) {
  const SweepResult result = *RunSweep(TinyConfig());
  const std::string csv = *EmitHeatmap(result, AttackMode::kLoss);
  const std::vector<std::string> lines =
      absl::StrSplit(csv, '\n', absl::SkipEmpty());
  ASSERT_EQ(lines.size(), 3u);
  int blanks = 0, filled = 0;
  std::vector<std::vector<std::string>> cells;
  for (const std::string& line : lines) {
    cells.push_back(absl::StrSplit(line, ','));
    ASSERT_EQ(cells.back().size(), 3u);
    for (const std::string& c : cells.back()) (c.empty() ? blanks : filled)++;
  }
  EXPECT_EQ(blanks, 3);
  EXPECT_EQ(filled, 6);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(cells[i][i].empty());
    for (size_t j = i + 1; j < 3; ++j) {
      const double omega = std::stod(cells[i][j]);
      double n = 0.0;
      for (const CellSummary& c : AggregateCells(result)) {
        if (c.attack == AttackMode::kLoss && c.alpha0 == result.grid[i] &&
            c.alpha1 == result.grid[j]) {
          EXPECT_EQ(absl::StrFormat("%.6f", c.mean_accuracy), cells[i][j]);
          if (c.mean_accuracy >= 0.5) {
            n = *NLeakedBinary<double>({c.alpha0, c.alpha1}, c.mean_accuracy);
          }
        }
      }
      EXPECT_GE(omega, 0.0);
      const std::string expect =
          std::isinf(n) ? "inf" : absl::StrFormat("%.6f", n);
      EXPECT_EQ(cells[j][i], expect);
    }
  }
  EXPECT_EQ(*EmitHeatmap(*RunSweep(TinyConfig()), AttackMode::kLoss), csv);
  EXPECT_TRUE(HasErrorKind(EmitHeatmap(result, AttackMode::kMeta).status(),
                           ErrorKind::kUnknownAttack));
}

PairReport Cell(double a0, double a1, double omega) {
  PairReport r;
  r.alpha0 = a0;
  r.alpha1 = a1;
  r.attack = AttackMode::kMeta;
  r.accuracy = omega;
  r.n_eval = 40;
  r.n_leaked = omega < 0.5 ? 0.0 : *NLeakedBinary<double>({a0, a1}, omega);
  return r;
}

SweepResult HandResult(std::vector<PairReport> reports) {
  SweepResult result;
  result.grid = {0.0, 0.2, 0.5, 0.6, 0.8, 1.0};
  result.attacks = {AttackMode::kMeta};
  result.reports = std::move(reports);
  return result;
}

TEST(SummaryTest, AllChance) {
  const nlohmann::json s = SummaryJson(
      HandResult({Cell(0.2, 0.5, 0.5), Cell(0.5, 0.8, 0.5), Cell(0.2, 0.8, 0.5)}));
  const nlohmann::json& a = s["attacks"][0];
  EXPECT_EQ(a["median_n_leaked"], 0.0);
  EXPECT_EQ(a["min_gap_at_0_75"], "none");
  EXPECT_EQ(a["best_accuracy"], 0.5);
}

TEST(SummaryTest, InfiniteLeakExcluded) {
  const nlohmann::json s = SummaryJson(HandResult({Cell(0.2, 0.5, 1.0)}));
  const nlohmann::json& a = s["attacks"][0];
  EXPECT_EQ(a["median_n_leaked"], "none");
  EXPECT_EQ(a["cell_summaries"][0]["n_leaked"], "inf");
  EXPECT_EQ(a["min_gap_at_0_75"], 0.3);
}

TEST(SummaryTest, MinimumGapAtThreeQuarters) {
  const nlohmann::json s = SummaryJson(HandResult(
      {Cell(0.5, 0.6, 0.6), Cell(0.0, 0.2, 0.7), Cell(0.2, 0.5, 0.76),
       Cell(0.0, 1.0, 0.99), Cell(0.5, 1.0, 0.8)}));
  const nlohmann::json& a = s["attacks"][0];
  EXPECT_NEAR(a["min_gap_at_0_75"].get<double>(), 0.3, 1e-12);
  EXPECT_EQ(a["best_accuracy"], 0.99);
  EXPECT_EQ(a["cells"], 5);
}

TEST(SummaryTest, FiniteMedian) {
  EXPECT_FALSE(FiniteMedian({}).has_value());
  EXPECT_FALSE(FiniteMedian({INFINITY}).has_value());
  EXPECT_EQ(*FiniteMedian({3, INFINITY, 1, 2}), 2);
  EXPECT_EQ(*FiniteMedian({4, 1}), 2.5);
}

TEST(ReportsJsonTest, RoundTrip) {
  SweepResult result = HandResult({Cell(0.2, 0.5, 1.0), Cell(0.5, 0.6, 0.4)});
  result.reports[1].below_chance = true;
  result.reports[1].error = "boom";
  result.config_hash = "abc";
  const SweepResult back = *SweepResultFromJson(ReportsJson(result));
  EXPECT_EQ(ReportsJson(back).dump(), ReportsJson(result).dump());
  EXPECT_TRUE(std::isinf(back.reports[0].n_leaked));
  EXPECT_FALSE(SweepResultFromJson(nlohmann::json::object()).ok());
}

TEST(BlindGuessTest, PopulationVariance) {
  EXPECT_NEAR(BlindGuessMse({0, 0.25, 0.5, 0.75, 1}), 0.125, 1e-15);
  EXPECT_EQ(BlindGuessMse({0.5}), 0.0);
}

TEST(ConfigTest, JsonRoundTripAndHash) {
  ExperimentConfig cfg = TinyConfig();
  cfg.fixed_alpha0 = 0.5;
  cfg.master_seed = 99;
  const nlohmann::json doc = ExperimentConfigToJson(cfg);
  const ExperimentConfig back = *ExperimentConfigFromJson(doc);
  EXPECT_EQ(ExperimentConfigToJson(back).dump(), doc.dump());
  EXPECT_EQ(ConfigHash(back), ConfigHash(cfg));
  ExperimentConfig moved = cfg;
  moved.output_dir = "elsewhere";
  moved.workers = 4;
  EXPECT_EQ(ConfigHash(moved), ConfigHash(cfg));
  moved.master_seed = 100;
  EXPECT_NE(ConfigHash(moved), ConfigHash(cfg));
  EXPECT_EQ(ConfigHash(cfg).size(), 16u);

  nlohmann::json extra = doc;
  extra["surprise"] = 1;
  EXPECT_TRUE(HasErrorKind(ExperimentConfigFromJson(extra).status(),
                           ErrorKind::kConfigError));
}

TEST(ConfigTest, Validation) {
  const std::vector<void (*)(ExperimentConfig&)> breakers = {
      [](ExperimentConfig& c) { c.alpha_grid = {}; },
      [](ExperimentConfig& c) { c.alpha_grid = {0.5, 0.5}; },
      [](ExperimentConfig& c) { c.alpha_grid = {1.5}; },
      [](ExperimentConfig& c) { c.fixed_alpha0 = 0.3; },
      [](ExperimentConfig& c) { c.n_victim = 0; },
      [](ExperimentConfig& c) { c.n_shadow = 0; },
      [](ExperimentConfig& c) { c.dataset_size = 0; },
      [](ExperimentConfig& c) { c.attacks = {}; },
      [](ExperimentConfig& c) { c.repetitions = 0; },
      [](ExperimentConfig& c) { c.train.learning_rate = -1; },
      [](ExperimentConfig& c) { c.arch = DefaultArchitecture(3); },
  };
  EXPECT_TRUE(ValidateExperimentConfig(TinyConfig()).ok());
  for (size_t i = 0; i < breakers.size(); ++i) {
    ExperimentConfig cfg = TinyConfig();
    breakers[i](cfg);
    EXPECT_TRUE(HasErrorKind(ValidateExperimentConfig(cfg), ErrorKind::kConfigError))
        << i;
  }
}

TEST(ConfigTest, AttackNames) {
  for (AttackMode m : {AttackMode::kLoss, AttackMode::kThreshold, AttackMode::kMeta,
                       AttackMode::kMetaRegress, AttackMode::kLayerRank}) {
    EXPECT_EQ(*ParseAttackMode(AttackModeName(m)), m);
  }
  EXPECT_TRUE(HasErrorKind(ParseAttackMode("guess").status(),
                           ErrorKind::kUnknownAttack));
  EXPECT_FALSE(IsBinaryAttack(AttackMode::kMetaRegress) &&
               IsBinaryAttack(AttackMode::kLoss));
}

}  // namespace
}  // namespace distinf
