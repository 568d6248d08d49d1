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


#include "distinf/report.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "distinf/dataset_io.h"
#include "distinf/leakage.h"
#include "distinf/status.h"

namespace distinf {
namespace {

using nlohmann::json;

constexpr absl::string_view kReportsFormat = "distinf.reports.v1";
constexpr absl::string_view kSummaryFormat = "distinf.summary.v1";
constexpr absl::string_view kMedianRule =
    "median over cells of n_leaked recomputed from the cell's mean accuracy; "
    "non-finite values excluded, no trimming";

std::string Fixed6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.6f", v);
}

json OptionalNumber(const std::optional<double>& v) {
  return v.has_value() ? JsonNumber(*v) : json("none");
}

absl::Status Malformed(absl::string_view what) {
  return MakeError(ErrorKind::kMalformedDocument, what);
}

}  // namespace

json JsonNumber(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double NumberFromJson(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> FiniteMedian(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<CellSummary> AggregateCells(const SweepResult& result) {
  using Key = std::tuple<double, double, int>;
  std::vector<Key> order;
  std::map<Key, std::vector<const PairReport*>> groups;
  for (const PairReport& r : result.reports) {
    const Key key{r.alpha0, r.alpha1, static_cast<int>(r.attack)};
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<CellSummary> cells;
  for (const Key& key : order) {
    CellSummary c;
    c.alpha0 = std::get<0>(key);
    c.alpha1 = std::get<1>(key);
    c.attack = static_cast<AttackMode>(std::get<2>(key));
    std::vector<double> accs, leaks;
    for (const PairReport* r : groups[key]) {
      if (r->error.has_value()) {
        ++c.failures;
        continue;
      }
      accs.push_back(r->accuracy);
      leaks.push_back(r->n_leaked);
      c.n_eval = r->n_eval;
    }
    c.count = static_cast<int>(accs.size());
    if (c.count > 0) {
      double sum = 0.0;
      for (const double a : accs) sum += a;
      c.mean_accuracy = sum / c.count;
      if (c.count > 1) {
        double ss = 0.0;
        for (const double a : accs) ss += (a - c.mean_accuracy) * (a - c.mean_accuracy);
        c.std_accuracy = std::sqrt(ss / (c.count - 1));
      }
      c.median_n_leaked = FiniteMedian(leaks);
      if (c.alpha0 != c.alpha1 && c.mean_accuracy >= 0.5) {
        absl::StatusOr<double> n =
            NLeakedBinary<double>({c.alpha0, c.alpha1}, c.mean_accuracy);
        c.n_leaked_of_mean = n.ok() ? *n : 0.0;
      }
    }
    cells.push_back(c);
  }
  return cells;
}

absl::StatusOr<std::string> EmitHeatmap(const SweepResult& result,
                                        AttackMode attack) {
  if (std::find(result.attacks.begin(), result.attacks.end(), attack) ==
      result.attacks.end()) {
    return MakeError(ErrorKind::kUnknownAttack,
                     absl::StrCat("attack ", AttackModeName(attack),
                                  " is not part of this sweep"));
  }
  const size_t n = result.grid.size();
  std::vector<std::vector<std::string>> grid(n, std::vector<std::string>(n));
  for (const CellSummary& c : AggregateCells(result)) {
    if (c.attack != attack || c.count == 0) continue;
    auto find = [&](double a) {
      return static_cast<size_t>(
          std::find(result.grid.begin(), result.grid.end(), a) -
          result.grid.begin());
    };
    size_t i = find(c.alpha0), j = find(c.alpha1);
    if (i >= n || j >= n || i == j) continue;
    if (i > j) std::swap(i, j);
    grid[i][j] = Fixed6(c.mean_accuracy);
    grid[j][i] = Fixed6(c.n_leaked_of_mean);
  }
  std::string out;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (j > 0) out += ",";
      out += grid[i][j];
    }
    out += "\n";
  }
  return out;
}

json SummaryJson(const SweepResult& result) {
  const std::vector<CellSummary> cells = AggregateCells(result);
  json attacks = json::array();
  for (const AttackMode attack : result.attacks) {
    std::vector<double> leaks;
    std::optional<double> best, min_gap;
    double mean_sum = 0.0;
    int used = 0;
    json cell_list = json::array();
    for (const CellSummary& c : cells) {
      if (c.attack != attack) continue;
      cell_list.push_back({{"alpha0", c.alpha0},
                           {"alpha1", c.alpha1},
                           {"repetitions", c.count},
                           {"failures", c.failures},
                           {"mean_accuracy", JsonNumber(c.mean_accuracy)},
                           {"std_accuracy", JsonNumber(c.std_accuracy)},
                           {"n_eval", c.n_eval},
                           {"n_leaked", JsonNumber(c.n_leaked_of_mean)},
                           {"median_rep_n_leaked", OptionalNumber(c.median_n_leaked)}});
      if (c.count == 0 || c.alpha0 == c.alpha1) continue;
      leaks.push_back(c.n_leaked_of_mean);
      best = std::max(best.value_or(0.0), c.mean_accuracy);
      mean_sum += c.mean_accuracy;
      ++used;
      const double gap = std::abs(c.alpha1 - c.alpha0);
      if (c.mean_accuracy >= 0.75 && (!min_gap.has_value() || gap < *min_gap)) {
        min_gap = gap;
      }
    }
    attacks.push_back(
        {{"attack", std::string(AttackModeName(attack))},
         {"cells", used},
         {"mean_accuracy", used > 0 ? JsonNumber(mean_sum / used) : json("none")},
         {"best_accuracy", OptionalNumber(best)},
         {"median_n_leaked", OptionalNumber(FiniteMedian(leaks))},
         {"median_rule", std::string(kMedianRule)},
         {"min_gap_at_0_75", OptionalNumber(min_gap)},
         {"cell_summaries", std::move(cell_list)}});
  }
  json regression = json::array();
  for (const RegressionSummary& s : result.regression) {
    regression.push_back({{"rep", s.rep},
                          {"mse", JsonNumber(s.mse)},
                          {"blind_mse", JsonNumber(s.blind_mse)}});
  }
  json warnings = result.warnings;
  return {{"format", std::string(kSummaryFormat)},
          {"config_hash", result.config_hash},
          {"attacks", std::move(attacks)},
          {"regression", std::move(regression)},
          {"warnings", std::move(warnings)}};
}

json ReportsJson(const SweepResult& result) {
  json reports = json::array();
  for (const PairReport& r : result.reports) {
    json node = {{"alpha0", r.alpha0},
                 {"alpha1", r.alpha1},
                 {"attack", std::string(AttackModeName(r.attack))},
                 {"rep", r.rep},
                 {"accuracy", JsonNumber(r.accuracy)},
                 {"advantage", JsonNumber(r.advantage)},
                 {"n_leaked", JsonNumber(r.n_leaked)},
                 {"below_chance", r.below_chance},
                 {"n_eval", r.n_eval}};
    if (r.mse.has_value()) node["mse"] = JsonNumber(*r.mse);
    if (r.error.has_value()) node["error"] = *r.error;
    reports.push_back(std::move(node));
  }
  json regression = json::array();
  for (const RegressionSummary& s : result.regression) {
    json leaks = json::array();
    for (const double v : s.alpha_n_leaked) leaks.push_back(JsonNumber(v));
    regression.push_back({{"rep", s.rep},
                          {"mse", JsonNumber(s.mse)},
                          {"blind_mse", JsonNumber(s.blind_mse)},
                          {"alpha", s.alpha},
                          {"alpha_mse", s.alpha_mse},
                          {"alpha_n_leaked", std::move(leaks)},
                          {"predictions", s.predictions},
                          {"truths", s.truths}});
  }
  json attacks = json::array();
  for (const AttackMode m : result.attacks) {
    attacks.push_back(std::string(AttackModeName(m)));
  }
  json warnings = result.warnings;
  return {{"format", std::string(kReportsFormat)},
          {"config_hash", result.config_hash},
          {"dataset_size", result.dataset_size},
          {"grid", result.grid},
          {"attacks", std::move(attacks)},
          {"reports", std::move(reports)},
          {"regression", std::move(regression)},
          {"warnings", std::move(warnings)}};
}

absl::StatusOr<SweepResult> SweepResultFromJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("format") ||
      doc["format"] != std::string(kReportsFormat)) {
    return Malformed(absl::StrCat("expected a ", kReportsFormat, " document"));
  }
  SweepResult result;
  try {
    result.config_hash = doc.at("config_hash").get<std::string>();
    result.dataset_size = doc.at("dataset_size").get<int64_t>();
    result.grid = doc.at("grid").get<std::vector<double>>();
    for (const json& a : doc.at("attacks")) {
      DISTINF_ASSIGN_OR_RETURN(const AttackMode m,
                               ParseAttackMode(a.get<std::string>()));
      result.attacks.push_back(m);
    }
    for (const json& node : doc.at("reports")) {
      PairReport r;
      r.alpha0 = node.at("alpha0").get<double>();
      r.alpha1 = node.at("alpha1").get<double>();
      DISTINF_ASSIGN_OR_RETURN(r.attack,
                               ParseAttackMode(node.at("attack").get<std::string>()));
      r.rep = node.at("rep").get<int>();
      r.accuracy = NumberFromJson(node.at("accuracy"));
      r.advantage = NumberFromJson(node.at("advantage"));
      r.n_leaked = NumberFromJson(node.at("n_leaked"));
      r.below_chance = node.at("below_chance").get<bool>();
      r.n_eval = node.at("n_eval").get<int64_t>();
      if (node.contains("mse")) r.mse = NumberFromJson(node["mse"]);
      if (node.contains("error")) r.error = node["error"].get<std::string>();
      result.reports.push_back(std::move(r));
    }
    for (const json& node : doc.at("regression")) {
      RegressionSummary s;
      s.rep = node.at("rep").get<int>();
      s.mse = NumberFromJson(node.at("mse"));
      s.blind_mse = NumberFromJson(node.at("blind_mse"));
      s.alpha = node.at("alpha").get<std::vector<double>>();
      s.alpha_mse = node.at("alpha_mse").get<std::vector<double>>();
      for (const json& v : node.at("alpha_n_leaked")) {
        s.alpha_n_leaked.push_back(NumberFromJson(v));
      }
      s.predictions = node.at("predictions").get<std::vector<double>>();
      s.truths = node.at("truths").get<std::vector<double>>();
      result.regression.push_back(std::move(s));
    }
    result.warnings = doc.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    return Malformed(absl::StrCat("reports document: ", e.what()));
  }
  return result;
}

absl::Status WriteSweepOutputs(const SweepResult& result,
                               const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat("cannot create ", dir, ": ",
                                               ec.message()));
  }
  const std::filesystem::path base(dir);
  DISTINF_RETURN_IF_ERROR(WriteFile((base / "reports.json").string(),
                                    ReportsJson(result).dump(2) + "\n"));
  DISTINF_RETURN_IF_ERROR(WriteFile((base / "summary.json").string(),
                                    SummaryJson(result).dump(2) + "\n"));
  for (const AttackMode attack : result.attacks) {
    DISTINF_ASSIGN_OR_RETURN(const std::string csv, EmitHeatmap(result, attack));
    DISTINF_RETURN_IF_ERROR(WriteFile(
        (base / absl::StrCat("heatmap_", AttackModeName(attack), ".csv"))
            .string(),
        csv));
  }
  return absl::OkStatus();
}

}  // namespace distinf
