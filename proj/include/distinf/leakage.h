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

// Closed-form leakage bounds for distribution inference.
//
// Two families of distributions are covered:
//
//  * Boolean-property ratio distributions G_b(D), where a fraction alpha_b of
//    samples satisfies the property. BinaryAccuracyBound is the best accuracy
//    any test can reach from n direct samples, and NLeakedBinary inverts it:
//    given an attack's observed accuracy omega, it returns the number of
//    direct samples that would give the same accuracy.
//  * Finite Zipf (degree) distributions, pmf k^-s / H(N, s) on {1..N}, with
//    the analogous ZipfAccuracyBound / NLeakedDegree pair.
//
// All logarithms are natural. Omega below 0.5 is rejected, never flipped.
//
// The functions templated on Real are explicitly instantiated for double,
// long double and HighPrecision (see high_precision.h).

#ifndef DISTINF_LEAKAGE_H_
#define DISTINF_LEAKAGE_H_

#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace distinf {

struct RatioPair {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
};

// Both proportions finite and in [0, 1].
absl::Status ValidateRatioPair(const RatioPair& pair);

struct ZipfSpec {
  int64_t n_elems = 1;  // largest value with nonzero probability
  double exponent = 0.0;
};

absl::Status ValidateZipfSpec(const ZipfSpec& spec);

struct LeakageReport {
  double accuracy = 0.5;
  double advantage = 0.0;
  double n_leaked = 0.0;  // may be +inf
};

// Generalized harmonic number sum_{k=1..n} k^-s, by direct summation from
// the smallest term up. The double instantiation accumulates in long double.
template <typename Real = double>
Real Harmonic(int64_t n, double s);

// Upper bound on distinguishing accuracy from n samples:
//   1/2 + 1/2 * sqrt(1 - r^n),  r = max(lo/hi, (1-hi)/(1-lo)).
// A 0/0 ratio (alpha0 == alpha1 in {0, 1}) counts as 1, giving 0.5.
template <typename Real = double>
Real BinaryAccuracyBound(const RatioPair& pair, int64_t n);

// log(4 omega (1 - omega)) / log(r) with r as above. omega == 1 gives +inf;
// when r == 0 (the pair {0, 1}) the result is 0 for omega < 1.
// Errors: kEqualRatios, kOmegaOutOfRange, kInvalidArgument.
template <typename Real = double>
absl::StatusOr<Real> NLeakedBinary(const RatioPair& pair, const Real& omega);

// alpha (1 - alpha) / mse.
// Errors: kDegenerateAlpha for alpha in {0, 1}, kNonpositiveError for
// mse <= 0.
absl::StatusOr<double> NLeakedRegression(double alpha, double mse);

// Mean of the Zipf distribution, H(N, s-1) / H(N, s).
double ZipfMean(const ZipfSpec& spec);

// 1/2 + 1/2 sqrt(1 - (H0/H1 * N0^((s0-s1)[s1 > s0]))^n). Requires
// spec0.n_elems <= spec1.n_elems (kUnorderedSpecs otherwise; no swapping).
template <typename Real = double>
absl::StatusOr<Real> ZipfAccuracyBound(const ZipfSpec& spec0,
                                       const ZipfSpec& spec1, int64_t n);

// Inverse of ZipfAccuracyBound in n. Errors: kUnorderedSpecs,
// kOmegaOutOfRange, kZeroDenominator when the bound cannot separate the
// specs at all.
template <typename Real = double>
absl::StatusOr<Real> NLeakedDegree(const ZipfSpec& spec0,
                                   const ZipfSpec& spec1, const Real& omega);

// Upper bounds on KL(G0 || G1) and KL(G1 || G0):
//   forward = log(hi / lo), reverse = log((1 - lo) / (1 - hi)).
// A zero denominator yields +inf for that component.
struct KlBounds {
  double forward = 0.0;
  double reverse = 0.0;
};
KlBounds KlBoundsBinary(const RatioPair& pair);

// Total-variation bound sqrt(1 - exp(-d)) from a KL divergence d >= 0.
double TvFromKl(double kl);

// |Pr[guess | b] - Pr[guess | not b]|.
double Advantage(double p_correct_given_b, double p_predict_b_given_not_b);

}  // namespace distinf

#endif  // DISTINF_LEAKAGE_H_
