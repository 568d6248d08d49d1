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


#include "distinf/leakage.h"

#include <cmath>
#include <limits>
#include <vector>

#include "distinf/high_precision.h"
#include "distinf/status.h"
#include "gtest/gtest.h"

namespace distinf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Test-side evaluation of the bound, written directly from the closed form
// with both branches spelled out.
double BoundOracle(double a0, double a1, int n) {
  const double lo = std::min(a0, a1), hi = std::max(a0, a1);
  const double first = hi == 0 ? 1.0 : lo / hi;
  const double second = lo == 1 ? 1.0 : (1 - hi) / (1 - lo);
  return 0.5 + 0.5 * std::min(std::sqrt(1 - std::pow(first, n)),
                              std::sqrt(1 - std::pow(second, n)));
}

std::vector<double> Grid(double step) {
  std::vector<double> g;
  for (int i = 0; i * step <= 1.0 + 1e-12; ++i) g.push_back(i * step);
  g.back() = 1.0;
  return g;
}

TEST(HarmonicTest, Examples) {
  EXPECT_DOUBLE_EQ(Harmonic(1, 2.7), 1.0);
  EXPECT_NEAR(Harmonic(3, 1.0), 11.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(Harmonic(2, 2.0), 1.25);
}

TEST(HarmonicTest, MatchesNaiveSumAndPrecisions) {
  double naive = 0;
  for (int k = 1; k <= 1000; ++k) naive += std::pow(k, -1.3);
  EXPECT_NEAR(Harmonic(1000, 1.3), naive, 1e-11);
  EXPECT_NEAR(static_cast<double>(Harmonic<HighPrecision>(1000, 1.3)),
              Harmonic(1000, 1.3), 1e-13);
}

TEST(BinaryAccuracyBoundTest, Examples) {
  EXPECT_DOUBLE_EQ(BinaryAccuracyBound({0.3, 0.3}, 10), 0.5);
  EXPECT_NEAR(BinaryAccuracyBound({0.5, 1.0}, 1), 0.853553, 1e-6);
  EXPECT_DOUBLE_EQ(BinaryAccuracyBound({0.0, 1.0}, 1), 1.0);
  EXPECT_DOUBLE_EQ(BinaryAccuracyBound({0.0, 0.0}, 5), 0.5);
  EXPECT_DOUBLE_EQ(BinaryAccuracyBound({1.0, 1.0}, 5), 0.5);
}

TEST(BinaryAccuracyBoundTest, MatchesOracleOnGrid) {
  for (double a0 : Grid(0.05)) {
    for (double a1 : Grid(0.05)) {
      for (int n = 1; n <= 20; ++n) {
        EXPECT_NEAR(BinaryAccuracyBound({a0, a1}, n), BoundOracle(a0, a1, n),
                    1e-12)
            << a0 << " " << a1 << " " << n;
      }
    }
  }
}

TEST(BinaryAccuracyBoundTest, SymmetryAndMonotonicity) {
  for (double a0 : Grid(0.1)) {
    for (double a1 : Grid(0.1)) {
      double prev = 0.5;
      for (int n = 1; n <= 30; ++n) {
        const double b = BinaryAccuracyBound({a0, a1}, n);
        EXPECT_EQ(b, BinaryAccuracyBound({a1, a0}, n));
        EXPECT_NEAR(b, BinaryAccuracyBound({1 - a0, 1 - a1}, n), 1e-12);
        EXPECT_GE(b, prev);
        EXPECT_GE(b, 0.5);
        EXPECT_LE(b, 1.0);
        prev = b;
      }
    }
  }
}

TEST(BinaryAccuracyBoundTest, SandwichedByKlChain) {
  for (double a0 : Grid(0.1)) {
    for (double a1 : Grid(0.1)) {
      const KlBounds kl = KlBoundsBinary({a0, a1});
      const double d = std::min(kl.forward, kl.reverse);
      for (int n = 1; n <= 30; ++n) {
        const double b = BinaryAccuracyBound({a0, a1}, n);
        EXPECT_LE(b, 0.5 + 0.5 * TvFromKl(n * d) + 1e-12);
      }
    }
  }
}

TEST(NLeakedBinaryTest, Examples) {
  EXPECT_NEAR(*NLeakedBinary<double>({0.5, 0.52}, 0.95), 42.34, 0.005);
  EXPECT_EQ(*NLeakedBinary<double>({0.2, 0.7}, 0.5), 0.0);
  EXPECT_NEAR(*NLeakedBinary<double>({0.5, 1.0}, 0.95),
              std::log(0.19) / std::log(0.5), 1e-12);
  EXPECT_NEAR(*NLeakedBinary<double>({0.5, 1.0}, 0.95), 2.3958, 2e-4);
}

TEST(NLeakedBinaryTest, Sentinels) {
  EXPECT_EQ(*NLeakedBinary<double>({0.2, 0.7}, 1.0), kInf);
  EXPECT_EQ(*NLeakedBinary<double>({0.0, 1.0}, 0.9), 0.0);
  EXPECT_EQ(*NLeakedBinary<double>({0.0, 1.0}, 1.0), kInf);
}

TEST(NLeakedBinaryTest, Errors) {
  EXPECT_TRUE(HasErrorKind(NLeakedBinary<double>({0.4, 0.4}, 0.7).status(),
                           ErrorKind::kEqualRatios));
  EXPECT_TRUE(HasErrorKind(NLeakedBinary<double>({0.4, 0.6}, 0.49).status(),
                           ErrorKind::kOmegaOutOfRange));
  EXPECT_TRUE(HasErrorKind(NLeakedBinary<double>({0.4, 0.6}, 1.01).status(),
                           ErrorKind::kOmegaOutOfRange));
  EXPECT_TRUE(HasErrorKind(
      NLeakedBinary<double>({0.4, 0.6}, std::nan("")).status(),
      ErrorKind::kOmegaOutOfRange));
}

TEST(NLeakedBinaryTest, MonotoneInOmega) {
  for (double a0 : Grid(0.1)) {
    for (double a1 : Grid(0.1)) {
      if (a0 == a1) continue;
      double prev = 0.0;
      for (double w = 0.5; w < 1.0; w += 0.01) {
        const double n = *NLeakedBinary<double>({a0, a1}, w);
        EXPECT_GE(n, prev);
        prev = n;
      }
    }
  }
}

TEST(NLeakedBinaryTest, RoundTripInHighPrecision) {
  for (double a0 : Grid(0.1)) {
    for (double a1 : Grid(0.1)) {
      if (a0 == a1 || (std::min(a0, a1) == 0 && std::max(a0, a1) == 1)) {
        continue;
      }
      for (int n = 1; n <= 30; ++n) {
        const HighPrecision w = BinaryAccuracyBound<HighPrecision>({a0, a1}, n);
        const HighPrecision back = *NLeakedBinary<HighPrecision>({a0, a1}, w);
        EXPECT_NEAR(static_cast<double>(back), n, 1e-9) << a0 << " " << a1;
      }
    }
  }
}

TEST(NLeakedBinaryTest, RoundTripInDoubleAwayFromSaturation) {
  // Once r^n drops below ~1e-6 the double-precision bound carries too few
  // digits of 1 - omega; stay above that.
  for (double a0 : {0.3, 0.5}) {
    for (double a1 : {0.4, 0.6}) {
      for (int n = 1; n <= 10; ++n) {
        const double w = BinaryAccuracyBound({a0, a1}, n);
        EXPECT_NEAR(*NLeakedBinary<double>({a0, a1}, w), n, 1e-6);
      }
    }
  }
}

TEST(NLeakedRegressionTest, Examples) {
  EXPECT_DOUBLE_EQ(*NLeakedRegression(0.5, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(*NLeakedRegression(0.5, 0.0025), 100.0);
  EXPECT_NEAR(*NLeakedRegression(0.2, 0.001), 160.0, 1e-9);
  EXPECT_TRUE(HasErrorKind(NLeakedRegression(0.0, 0.1).status(),
                           ErrorKind::kDegenerateAlpha));
  EXPECT_TRUE(HasErrorKind(NLeakedRegression(1.0, 0.1).status(),
                           ErrorKind::kDegenerateAlpha));
  EXPECT_TRUE(HasErrorKind(NLeakedRegression(0.5, 0.0).status(),
                           ErrorKind::kNonpositiveError));
}

TEST(ZipfMeanTest, Examples) {
  EXPECT_DOUBLE_EQ(ZipfMean({1, 3.2}), 1.0);
  EXPECT_NEAR(ZipfMean({3, 0.0}), 2.0, 1e-15);
  EXPECT_NEAR(ZipfMean({2, 2.0}), 1.2, 1e-15);
}

TEST(ZipfMeanTest, RangeAndMonotonicity) {
  for (int64_t n : {2, 5, 50, 1000}) {
    double prev = kInf;
    for (double s = -1.0; s <= 4.0; s += 0.25) {
      const double m = ZipfMean({n, s});
      EXPECT_GE(m, 1.0);
      EXPECT_LE(m, static_cast<double>(n));
      EXPECT_LT(m, prev);
      prev = m;
    }
  }
}

TEST(ZipfAccuracyBoundTest, Examples) {
  EXPECT_DOUBLE_EQ(*ZipfAccuracyBound<double>({50, 1.0}, {50, 1.0}, 5), 0.5);
  EXPECT_NEAR(*ZipfAccuracyBound<double>({10, 2.0}, {10, 1.0}, 1), 0.84311,
              1e-5);
  // With s1 > s0 the indicator term is active: the ratio becomes
  // H(10,1)/H(10,2) * 10^-1, which is not the mirror image of the row above.
  const double h1 = 2.928968253968254, h2 = 1.5497677311665408;
  const double expected = 0.5 + 0.5 * std::sqrt(1 - h1 / h2 / 10.0);
  EXPECT_NEAR(*ZipfAccuracyBound<double>({10, 1.0}, {10, 2.0}, 1), expected,
              1e-12);
  EXPECT_NEAR(expected, 0.95028, 1e-5);
}

TEST(ZipfAccuracyBoundTest, RejectsUnorderedSpecs) {
  EXPECT_TRUE(HasErrorKind(
      ZipfAccuracyBound<double>({20, 1.0}, {10, 1.0}, 1).status(),
      ErrorKind::kUnorderedSpecs));
  EXPECT_TRUE(HasErrorKind(
      NLeakedDegree<double>({20, 1.0}, {10, 1.0}, 0.7).status(),
      ErrorKind::kUnorderedSpecs));
}

TEST(NLeakedDegreeTest, Examples) {
  EXPECT_EQ(*NLeakedDegree<double>({10, 2.0}, {10, 1.0}, 0.5), 0.0);
  const double w = *ZipfAccuracyBound<double>({10, 2.0}, {10, 1.0}, 1);
  EXPECT_NEAR(*NLeakedDegree<double>({10, 2.0}, {10, 1.0}, w), 1.0, 1e-9);
  EXPECT_NEAR(*NLeakedDegree<double>({10, 2.0}, {10, 1.0}, 0.84311), 1.0,
              1e-4);
  EXPECT_EQ(*NLeakedDegree<double>({10, 2.0}, {10, 1.0}, 1.0), kInf);
  EXPECT_TRUE(HasErrorKind(
      NLeakedDegree<double>({10, 1.0}, {10, 1.0}, 0.7).status(),
      ErrorKind::kZeroDenominator));
}

TEST(NLeakedDegreeTest, RoundTripInHighPrecision) {
  const std::vector<ZipfSpec> specs = {{5, 1.0},  {5, 2.0},  {10, 1.0},
                                       {10, 2.0}, {20, 1.5}, {50, 0.5}};
  int checked = 0;
  for (const ZipfSpec& a : specs) {
    for (const ZipfSpec& b : specs) {
      if (a.n_elems > b.n_elems) continue;
      if (!NLeakedDegree<double>(a, b, 0.7).ok()) continue;
      for (int n = 1; n <= 30; ++n) {
        const HighPrecision w = *ZipfAccuracyBound<HighPrecision>(a, b, n);
        EXPECT_NEAR(static_cast<double>(*NLeakedDegree<HighPrecision>(a, b, w)),
                    n, 1e-9);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(KlBoundsTest, Examples) {
  KlBounds k = KlBoundsBinary({0.5, 0.5});
  EXPECT_EQ(k.forward, 0.0);
  EXPECT_EQ(k.reverse, 0.0);
  k = KlBoundsBinary({0.25, 0.5});
  EXPECT_NEAR(k.forward, std::log(2.0), 1e-15);
  EXPECT_NEAR(k.reverse, std::log(1.5), 1e-15);
  k = KlBoundsBinary({0.0, 0.5});
  EXPECT_EQ(k.forward, kInf);
  EXPECT_NEAR(k.reverse, std::log(2.0), 1e-15);
}

TEST(TvFromKlTest, Examples) {
  EXPECT_EQ(TvFromKl(0.0), 0.0);
  EXPECT_EQ(TvFromKl(kInf), 1.0);
  EXPECT_NEAR(TvFromKl(std::log(2.0)), std::sqrt(0.5), 1e-15);
}

TEST(AdvantageTest, Examples) {
  EXPECT_EQ(Advantage(1.0, 0.0), 1.0);
  EXPECT_EQ(Advantage(0.5, 0.5), 0.0);
  EXPECT_NEAR(Advantage(0.8, 0.3), 0.5, 1e-15);
}

TEST(RatioPairTest, Validation) {
  EXPECT_TRUE(ValidateRatioPair({0.0, 1.0}).ok());
  EXPECT_FALSE(ValidateRatioPair({-0.1, 0.5}).ok());
  EXPECT_FALSE(ValidateRatioPair({0.5, std::nan("")}).ok());
  EXPECT_TRUE(ValidateZipfSpec({1, 0.0}).ok());
  EXPECT_FALSE(ValidateZipfSpec({0, 1.0}).ok());
}

}  // namespace
}  // namespace distinf
