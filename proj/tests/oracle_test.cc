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

#include <cmath>
#include <vector>

#include "distinf/leakage.h"
#include "distinf/status.h"
#include "gtest/gtest.h"

namespace distinf {
namespace {

// Binomial pmf through lgamma, independent of the library's recurrence.
double BinomPmf(int n, int k, double p) {
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0) + k * std::log(p) +
                  (n - k) * std::log1p(-p));
}

double BayesOracle(double a0, double a1, int n) {
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    acc += std::max(BinomPmf(n, k, a0), BinomPmf(n, k, a1));
  }
  return acc / 2.0;
}

TEST(ExactOptimalAccuracyTest, Examples) {
  EXPECT_NEAR(*ExactOptimalAccuracy({0.3, 0.3}, 17), 0.5, 1e-14);
  EXPECT_DOUBLE_EQ(*ExactOptimalAccuracy({0.0, 1.0}, 1), 1.0);
  EXPECT_DOUBLE_EQ(*ExactOptimalAccuracy({0.5, 1.0}, 1), 0.75);
}

TEST(ExactOptimalAccuracyTest, MatchesLgammaOracle) {
  for (double a0 = 0.0; a0 <= 1.0; a0 += 0.125) {
    for (double a1 = 0.0; a1 <= 1.0; a1 += 0.125) {
      for (int n : {1, 2, 5, 13, 40, 64}) {
        EXPECT_NEAR(*ExactOptimalAccuracy({a0, a1}, n), BayesOracle(a0, a1, n),
                    1e-12);
      }
    }
  }
}

TEST(ExactOptimalAccuracyTest, MonotoneAndSymmetric) {
  for (double a0 = 0.0; a0 <= 1.0; a0 += 0.1) {
    for (double a1 = 0.0; a1 <= 1.0; a1 += 0.1) {
      double prev = 0.5 - 1e-15;
      for (int n = 1; n <= 30; ++n) {
        const double v = *ExactOptimalAccuracy({a0, a1}, n);
        EXPECT_EQ(v, *ExactOptimalAccuracy({a1, a0}, n));
        EXPECT_GE(v, prev - 1e-15);
        prev = v;
      }
    }
  }
}

TEST(ExactOptimalAccuracyTest, Limits) {
  EXPECT_TRUE(HasErrorKind(ExactOptimalAccuracy({0.2, 0.4}, 65).status(),
                           ErrorKind::kTooLarge));
  EXPECT_FALSE(ExactOptimalAccuracy({0.2, 0.4}, 0).ok());
}

TEST(ExactRegressionMseTest, Examples) {
  EXPECT_NEAR(*ExactRegressionMse(0.5, 2), 0.125, 1e-15);
  EXPECT_EQ(*ExactRegressionMse(0.0, 10), 0.0);
  EXPECT_NEAR(*ExactRegressionMse(0.3, 7), 0.03, 1e-15);
  EXPECT_TRUE(HasErrorKind(ExactRegressionMse(0.3, 100).status(),
                           ErrorKind::kTooLarge));
}

TEST(McOptimalAccuracyZipfTest, IdenticalSpecsGiveChance) {
  const McEstimate e = *McOptimalAccuracyZipf({10, 1.5}, {10, 1.5}, 3, 10000, 1);
  EXPECT_NEAR(e.mean, 0.5, 3 * e.std_error);
  EXPECT_EQ(e.trials, 10000);
}

TEST(McOptimalAccuracyZipfTest, MatchesSingleSampleEnumeration) {
  const ZipfSpec s0{5, 1.0}, s1{10, 1.0};
  const double h0 = Harmonic(5, 1.0), h1 = Harmonic(10, 1.0);
  double exact = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double p0 = k <= 5 ? 1.0 / k / h0 : 0.0;
    const double p1 = 1.0 / k / h1;
    exact += std::max(p0, p1);
  }
  exact /= 2.0;
  const McEstimate e = *McOptimalAccuracyZipf(s0, s1, 1, 100000, 2);
  EXPECT_NEAR(e.mean, exact, 3 * e.std_error);
}

TEST(McOptimalAccuracyZipfTest, DominatedByBound) {
  const McEstimate e = *McOptimalAccuracyZipf({10, 2.0}, {10, 1.0}, 4, 100000, 3);
  EXPECT_LE(e.mean,
            *ZipfAccuracyBound<double>({10, 2.0}, {10, 1.0}, 4) + 3 * e.std_error);
}

TEST(McOptimalAccuracyZipfTest, DeterministicAcrossWorkerCounts) {
  const McEstimate a = *McOptimalAccuracyZipf({8, 1.0}, {12, 1.2}, 5, 5000, 9, 1);
  const McEstimate b = *McOptimalAccuracyZipf({8, 1.0}, {12, 1.2}, 5, 5000, 9, 1);
  const McEstimate c = *McOptimalAccuracyZipf({8, 1.0}, {12, 1.2}, 5, 5000, 9, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.mean, c.mean);
}

TEST(McOptimalAccuracyZipfTest, RejectsFewTrials) {
  EXPECT_FALSE(McOptimalAccuracyZipf({8, 1.0}, {12, 1.2}, 5, 999, 9).ok());
}

TEST(McAttackAccuracyTest, Examples) {
  const std::vector<int> truth = {0, 1, 0, 1};
  EXPECT_EQ(McAttackAccuracy(std::vector<int>{0, 1, 0, 1}, truth)->accuracy, 1.0);
  EXPECT_EQ(McAttackAccuracy(std::vector<int>{0, 0, 0, 0}, truth)->accuracy, 0.5);
  EXPECT_NEAR(McAttackAccuracy(std::vector<int>{1, 1, 0},
                               std::vector<int>{0, 1, 0})
                  ->accuracy,
              2.0 / 3.0, 1e-15);
}

TEST(McAttackAccuracyTest, AdvantageAndErrors) {
  const AttackTally t = *McAttackAccuracy(std::vector<int>{1, 1, 0, 0},
                                          std::vector<int>{1, 1, 1, 0});
  EXPECT_NEAR(*t.correct_rate1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(*t.correct_rate0, 1.0);
  EXPECT_NEAR(*t.advantage(), 2.0 / 3.0, 1e-15);
  EXPECT_TRUE(HasErrorKind(McAttackAccuracy(std::vector<int>{1},
                                            std::vector<int>{1, 0})
                               .status(),
                           ErrorKind::kLengthMismatch));
  EXPECT_FALSE(McAttackAccuracy(std::vector<int>{}, std::vector<int>{}).ok());
  EXPECT_FALSE(McAttackAccuracy(std::vector<int>{2}, std::vector<int>{1}).ok());
}

}  // namespace
}  // namespace distinf
