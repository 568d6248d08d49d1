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


// Sweep aggregation and the files a sweep writes:
//   reports.json         every PairReport plus regression hold-out summaries
//   heatmap_<attack>.csv  mean accuracy above the diagonal, n_leaked below
//   summary.json         per-attack medians and thresholds
// Heatmap floats use 6 decimals; JSON numbers are shortest round-trip
// decimals, with infinities written as the string "inf".

#ifndef DISTINF_REPORT_H_
#define DISTINF_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "distinf/harness.h"
#include "json.hpp"

namespace distinf {

struct CellSummary {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  AttackMode attack = AttackMode::kLoss;
  int count = 0;  // successful repetitions
  int failures = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample std over repetitions; 0 for one
  int64_t n_eval = 0;         // victims per repetition
  // Median over repetitions of the finite per-repetition n_leaked values.
  std::optional<double> median_n_leaked;
  // n_leaked recomputed from mean_accuracy (0 below chance).
  double n_leaked_of_mean = 0.0;
};

// One cell per (pair, attack), in the order pairs first appear.
std::vector<CellSummary> AggregateCells(const SweepResult& result);

// Median of the finite values; nullopt when there are none.
std::optional<double> FiniteMedian(std::vector<double> values);

// Square CSV over the grid. Cell (i, j), i < j: mean accuracy for the pair;
// cell (j, i): n_leaked of that mean; diagonal and missing cells blank.
// kUnknownAttack when the attack was not part of the sweep.
absl::StatusOr<std::string> EmitHeatmap(const SweepResult& result,
                                        AttackMode attack);

nlohmann::json SummaryJson(const SweepResult& result);
nlohmann::json ReportsJson(const SweepResult& result);
absl::StatusOr<SweepResult> SweepResultFromJson(const nlohmann::json& doc);

// Writes all three artifacts into `dir`, creating it if needed.
absl::Status WriteSweepOutputs(const SweepResult& result,
                               const std::string& dir);

// Shortest round-trip number, or "inf" / "-inf" / null.
nlohmann::json JsonNumber(double v);
double NumberFromJson(const nlohmann::json& v);

}  // namespace distinf

#endif  // DISTINF_REPORT_H_
