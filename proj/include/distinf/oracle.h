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

// Ground-truth distinguishers used to validate the closed forms in
// leakage.h. Nothing here calls into the bound formulas.

#ifndef DISTINF_ORACLE_H_
#define DISTINF_ORACLE_H_

#include <cstdint>
#include <optional>
#include <span>

#include "absl/status/statusor.h"
#include "distinf/leakage.h"

namespace distinf {

inline constexpr int64_t kMaxEnumerationSize = 64;

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int64_t trials = 0;
  uint64_t seed = 0;
};

// Bayes accuracy (equal priors) of the likelihood-ratio test on the count of
// property-positive samples among n: 1/2 sum_k max(Bin(n,a0)(k), Bin(n,a1)(k)).
// kTooLarge when n > 64.
absl::StatusOr<double> ExactOptimalAccuracy(const RatioPair& pair, int64_t n);

// E[(k/n - alpha)^2] for k ~ Bin(n, alpha), by enumeration. kTooLarge when
// n > 64.
absl::StatusOr<double> ExactRegressionMse(double alpha, int64_t n);

// Monte Carlo accuracy of the exact likelihood-ratio test between two Zipf
// specs given n iid draws. Trial t draws from its own substream
// MixSeed(seed, t), so the estimate does not depend on `workers`.
// Requires trials >= 1000.
absl::StatusOr<McEstimate> McOptimalAccuracyZipf(const ZipfSpec& spec0,
                                                 const ZipfSpec& spec1,
                                                 int64_t n, int64_t trials,
                                                 uint64_t seed,
                                                 int workers = 1);

struct AttackTally {
  double accuracy = 0.0;
  int64_t total = 0;
  // Pr[guess = b | b] per true class; empty when the class is absent.
  std::optional<double> correct_rate0;
  std::optional<double> correct_rate1;

  // |Pr[guess=1 | b=1] - Pr[guess=1 | b=0]|, when both classes are present.
  std::optional<double> advantage() const;
};

// Accuracy of bit predictions against truths. kLengthMismatch on unequal
// lengths, kInvalidArgument on empty input or non-bit values.
absl::StatusOr<AttackTally> McAttackAccuracy(std::span<const int> predictions,
                                             std::span<const int> truths);

}  // namespace distinf

#endif  // DISTINF_ORACLE_H_
