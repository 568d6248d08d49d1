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

#include "distinf/oracle.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "absl/strings/str_format.h"
#include "distinf/random.h"
#include "distinf/status.h"
#include "distinf/synthdata.h"

namespace distinf {
namespace {

absl::Status CheckEnumerable(int64_t n) {
  if (n < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "n must be positive");
  }
  if (n > kMaxEnumerationSize) {
    return MakeError(ErrorKind::kTooLarge,
                     absl::StrFormat("n=%d exceeds enumeration limit %d", n,
                                     kMaxEnumerationSize));
  }
  return absl::OkStatus();
}

// Bin(n, p) pmf for k = 0..n.
std::vector<long double> BinomialPmf(int64_t n, double p) {
  std::vector<long double> pmf(n + 1);
  long double choose = 1;
  for (int64_t k = 0; k <= n; ++k) {
    if (k > 0) choose = choose * static_cast<long double>(n - k + 1) / k;
    pmf[k] = choose * std::pow(static_cast<long double>(p), k) *
             std::pow(1.0L - p, n - k);
  }
  return pmf;
}

// Log-pmf of a Zipf spec indexed by value (index 0 unused).
std::vector<double> ZipfLogPmf(const ZipfSpec& spec) {
  std::vector<double> log_pmf(spec.n_elems + 1, 0.0);
  const long double log_h =
      std::log(Harmonic<long double>(spec.n_elems, spec.exponent));
  for (int64_t k = 1; k <= spec.n_elems; ++k) {
    log_pmf[k] = static_cast<double>(
        -spec.exponent * std::log(static_cast<long double>(k)) - log_h);
  }
  return log_pmf;
}

struct ZipfTrialContext {
  ZipfSampler sampler0;
  ZipfSampler sampler1;
  std::vector<double> log_pmf0;
  std::vector<double> log_pmf1;
  int64_t n;
  uint64_t seed;
};

// 1 if the likelihood-ratio test decides correctly on trial t.
int RunZipfTrial(const ZipfTrialContext& ctx, int64_t t) {
  Rng rng(MixSeed({ctx.seed, Tag(StreamTag::kMonteCarlo),
                   static_cast<uint64_t>(t)}));
  const int truth = rng.Bernoulli(0.5) ? 1 : 0;
  const ZipfSampler& sampler = truth == 0 ? ctx.sampler0 : ctx.sampler1;
  const int64_t n0 = static_cast<int64_t>(ctx.log_pmf0.size()) - 1;
  const int64_t n1 = static_cast<int64_t>(ctx.log_pmf1.size()) - 1;
  double llr = 0.0;
  int forced = -1;
  for (int64_t i = 0; i < ctx.n; ++i) {
    const int64_t x = sampler.Sample(rng);
    if (forced >= 0) continue;
    if (x > n0) {
      forced = 1;
    } else if (x > n1) {
      forced = 0;
    } else {
      llr += ctx.log_pmf1[x] - ctx.log_pmf0[x];
    }
  }
  const int decision = forced >= 0 ? forced : (llr > 0.0 ? 1 : 0);
  return decision == truth ? 1 : 0;
}

}  // namespace

absl::StatusOr<double> ExactOptimalAccuracy(const RatioPair& pair, int64_t n) {
  DISTINF_RETURN_IF_ERROR(ValidateRatioPair(pair));
  DISTINF_RETURN_IF_ERROR(CheckEnumerable(n));
  const std::vector<long double> pmf0 = BinomialPmf(n, pair.alpha0);
  const std::vector<long double> pmf1 = BinomialPmf(n, pair.alpha1);
  long double total = 0;
  for (int64_t k = 0; k <= n; ++k) total += std::max(pmf0[k], pmf1[k]);
  return static_cast<double>(total / 2);
}

absl::StatusOr<double> ExactRegressionMse(double alpha, int64_t n) {
  DISTINF_RETURN_IF_ERROR(ValidateRatioPair({alpha, alpha}));
  DISTINF_RETURN_IF_ERROR(CheckEnumerable(n));
  const std::vector<long double> pmf = BinomialPmf(n, alpha);
  long double total = 0;
  for (int64_t k = 0; k <= n; ++k) {
    const long double err = static_cast<long double>(k) / n - alpha;
    total += pmf[k] * err * err;
  }
  return static_cast<double>(total);
}

absl::StatusOr<McEstimate> McOptimalAccuracyZipf(const ZipfSpec& spec0,
                                                 const ZipfSpec& spec1,
                                                 int64_t n, int64_t trials,
                                                 uint64_t seed, int workers) {
  DISTINF_RETURN_IF_ERROR(ValidateZipfSpec(spec0));
  DISTINF_RETURN_IF_ERROR(ValidateZipfSpec(spec1));
  if (n < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "n must be positive");
  }
  if (trials < 1000) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "Monte Carlo estimates need at least 1000 trials");
  }
  const ZipfTrialContext ctx{ZipfSampler(spec0), ZipfSampler(spec1),
                             ZipfLogPmf(spec0), ZipfLogPmf(spec1), n, seed};

  workers = std::clamp<int>(workers, 1, 64);
  std::vector<int64_t> correct(workers, 0);
  auto run_chunk = [&](int w) {
    const int64_t begin = trials * w / workers;
    const int64_t end = trials * (w + 1) / workers;
    int64_t hits = 0;
    for (int64_t t = begin; t < end; ++t) hits += RunZipfTrial(ctx, t);
    correct[w] = hits;
  };
  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run_chunk, w);
    for (auto& t : threads) t.join();
  }
  int64_t hits = 0;
  for (const int64_t c : correct) hits += c;

  McEstimate estimate;
  estimate.trials = trials;
  estimate.seed = seed;
  estimate.mean = static_cast<double>(hits) / static_cast<double>(trials);
  estimate.std_error = std::sqrt(estimate.mean * (1.0 - estimate.mean) /
                                 static_cast<double>(trials));
  return estimate;
}

std::optional<double> AttackTally::advantage() const {
  if (!correct_rate0.has_value() || !correct_rate1.has_value()) {
    return std::nullopt;
  }
  return Advantage(*correct_rate1, 1.0 - *correct_rate0);
}

absl::StatusOr<AttackTally> McAttackAccuracy(std::span<const int> predictions,
                                             std::span<const int> truths) {
  if (predictions.size() != truths.size()) {
    return MakeError(ErrorKind::kLengthMismatch,
                     absl::StrFormat("%d predictions vs %d truths",
                                     predictions.size(), truths.size()));
  }
  if (predictions.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "no predictions");
  }
  int64_t correct = 0;
  int64_t count[2] = {0, 0};
  int64_t hits[2] = {0, 0};
  for (size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int t = truths[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1)) {
      return MakeError(ErrorKind::kInvalidArgument, "values must be bits");
    }
    ++count[t];
    if (p == t) {
      ++correct;
      ++hits[t];
    }
  }
  AttackTally tally;
  tally.total = static_cast<int64_t>(predictions.size());
  tally.accuracy = static_cast<double>(correct) / tally.total;
  if (count[0] > 0) {
    tally.correct_rate0 = static_cast<double>(hits[0]) / count[0];
  }
  if (count[1] > 0) {
    tally.correct_rate1 = static_cast<double>(hits[1]) / count[1];
  }
  return tally;
}

}  // namespace distinf
