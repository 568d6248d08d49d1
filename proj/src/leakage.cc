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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "distinf/high_precision.h"
#include "distinf/status.h"

namespace distinf {
namespace {

template <typename Real>
struct AccumulatorFor {
  using type = Real;
};
template <>
struct AccumulatorFor<double> {
  using type = long double;
};

template <typename Real>
Real Infinity() {
  return std::numeric_limits<Real>::infinity();
}

template <typename Real>
Real IntPow(Real base, int64_t exponent) {
  Real result = 1;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

// max(lo/hi, (1-hi)/(1-lo)) with 0/0 read as 1.
template <typename Real>
Real LargestLikelihoodRatio(const RatioPair& pair) {
  const Real lo = std::min(pair.alpha0, pair.alpha1);
  const Real hi = std::max(pair.alpha0, pair.alpha1);
  const Real one = 1;
  const Real by_positives = hi == 0 ? one : Real(lo / hi);
  const Real by_negatives = (one - lo) == 0 ? one : Real((one - hi) / (one - lo));
  return std::max(by_positives, by_negatives);
}

// log(4 w (1 - w)) for w in [0.5, 1], accurate at both ends.
template <typename Real>
Real LogFourOmegaComplement(const Real& omega) {
  using std::log;
  using std::log1p;
  if (omega <= Real(0.75)) {
    const Real centered = 2 * omega - 1;
    return log1p(Real(-centered * centered));
  }
  return log(Real(4 * omega * (1 - omega)));
}

template <typename Real>
absl::Status ValidateOmega(const Real& omega) {
  using std::isnan;
  if (isnan(omega) || omega < Real(0.5) || omega > Real(1)) {
    return MakeError(ErrorKind::kOmegaOutOfRange,
                     "omega must lie in [0.5, 1]; flip the predictor first");
  }
  return absl::OkStatus();
}

template <typename Real>
Real ZipfSeparationLog(const ZipfSpec& spec0, const ZipfSpec& spec1) {
  using std::log;
  const Real h0 = Harmonic<Real>(spec0.n_elems, spec0.exponent);
  const Real h1 = Harmonic<Real>(spec1.n_elems, spec1.exponent);
  Real value = log(Real(h0 / h1));
  if (spec1.exponent > spec0.exponent) {
    value += Real(spec0.exponent - spec1.exponent) *
             log(Real(static_cast<double>(spec0.n_elems)));
  }
  return value;
}

absl::Status ValidateOrderedSpecs(const ZipfSpec& spec0,
                                  const ZipfSpec& spec1) {
  DISTINF_RETURN_IF_ERROR(ValidateZipfSpec(spec0));
  DISTINF_RETURN_IF_ERROR(ValidateZipfSpec(spec1));
  if (spec0.n_elems > spec1.n_elems) {
    return MakeError(ErrorKind::kUnorderedSpecs,
                     absl::StrFormat("need N0 <= N1, got N0=%d N1=%d",
                                     spec0.n_elems, spec1.n_elems));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateRatioPair(const RatioPair& pair) {
  for (const double a : {pair.alpha0, pair.alpha1}) {
    if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrFormat("ratio %g outside [0, 1]", a));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateZipfSpec(const ZipfSpec& spec) {
  if (spec.n_elems < 1 || !std::isfinite(spec.exponent)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrFormat("bad Zipf spec N=%d s=%g", spec.n_elems,
                                     spec.exponent));
  }
  return absl::OkStatus();
}

template <typename Real>
Real Harmonic(int64_t n, double s) {
  using Accum = typename AccumulatorFor<Real>::type;
  using std::pow;
  Accum sum = 0;
  const Accum neg_s = -Accum(s);
  for (int64_t k = n; k >= 1; --k) {
    sum += pow(Accum(static_cast<double>(k)), neg_s);
  }
  return static_cast<Real>(sum);
}

template <typename Real>
Real BinaryAccuracyBound(const RatioPair& pair, int64_t n) {
  using std::sqrt;
  const Real ratio = LargestLikelihoodRatio<Real>(pair);
  const Real remaining = IntPow(ratio, n);
  return Real(0.5) + Real(0.5) * sqrt(Real(1 - remaining));
}

template <typename Real>
absl::StatusOr<Real> NLeakedBinary(const RatioPair& pair, const Real& omega) {
  using std::log;
  DISTINF_RETURN_IF_ERROR(ValidateRatioPair(pair));
  if (pair.alpha0 == pair.alpha1) {
    return MakeError(ErrorKind::kEqualRatios, "alpha0 == alpha1");
  }
  DISTINF_RETURN_IF_ERROR(ValidateOmega(omega));
  if (omega == Real(1)) return Infinity<Real>();
  if (omega == Real(0.5)) return Real(0);
  const Real ratio = LargestLikelihoodRatio<Real>(pair);
  if (ratio == 0) return Real(0);
  return Real(LogFourOmegaComplement(omega) / log(ratio));
}

absl::StatusOr<double> NLeakedRegression(double alpha, double mse) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0) {
    return MakeError(ErrorKind::kDegenerateAlpha,
                     absl::StrFormat("alpha=%g has zero variance or is "
                                     "outside (0, 1)",
                                     alpha));
  }
  if (std::isnan(mse) || mse <= 0.0) {
    return MakeError(ErrorKind::kNonpositiveError,
                     absl::StrFormat("squared error %g must be positive", mse));
  }
  return alpha * (1.0 - alpha) / mse;
}

double ZipfMean(const ZipfSpec& spec) {
  const long double num = Harmonic<long double>(spec.n_elems, spec.exponent - 1);
  const long double den = Harmonic<long double>(spec.n_elems, spec.exponent);
  return static_cast<double>(num / den);
}

template <typename Real>
absl::StatusOr<Real> ZipfAccuracyBound(const ZipfSpec& spec0,
                                       const ZipfSpec& spec1, int64_t n) {
  using std::exp;
  using std::sqrt;
  DISTINF_RETURN_IF_ERROR(ValidateOrderedSpecs(spec0, spec1));
  const Real log_ratio = ZipfSeparationLog<Real>(spec0, spec1);
  Real remaining = exp(Real(log_ratio * Real(static_cast<double>(n))));
  // The ratio cannot exceed 1 for ordered specs; clamp rounding noise.
  if (remaining > 1) remaining = 1;
  return Real(Real(0.5) + Real(0.5) * sqrt(Real(1 - remaining)));
}

template <typename Real>
absl::StatusOr<Real> NLeakedDegree(const ZipfSpec& spec0,
                                   const ZipfSpec& spec1, const Real& omega) {
  DISTINF_RETURN_IF_ERROR(ValidateOrderedSpecs(spec0, spec1));
  DISTINF_RETURN_IF_ERROR(ValidateOmega(omega));
  const Real denominator = ZipfSeparationLog<Real>(spec0, spec1);
  if (denominator >= 0) {
    return MakeError(ErrorKind::kZeroDenominator,
                     "specs are indistinguishable under the degree bound");
  }
  if (omega == Real(1)) return Infinity<Real>();
  if (omega == Real(0.5)) return Real(0);
  return Real(LogFourOmegaComplement(omega) / denominator);
}

KlBounds KlBoundsBinary(const RatioPair& pair) {
  const double lo = std::min(pair.alpha0, pair.alpha1);
  const double hi = std::max(pair.alpha0, pair.alpha1);
  const double inf = std::numeric_limits<double>::infinity();
  KlBounds bounds;
  if (hi == lo) {
    bounds.forward = 0.0;
    bounds.reverse = 0.0;
    return bounds;
  }
  bounds.forward = lo == 0.0 ? inf : std::log(hi / lo);
  bounds.reverse = hi == 1.0 ? inf : std::log((1.0 - lo) / (1.0 - hi));
  return bounds;
}

double TvFromKl(double kl) { return std::sqrt(-std::expm1(-kl)); }

double Advantage(double p_correct_given_b, double p_predict_b_given_not_b) {
  return std::abs(p_correct_given_b - p_predict_b_given_not_b);
}

#define DISTINF_INSTANTIATE_LEAKAGE(Real)                                    \
  template Real Harmonic<Real>(int64_t, double);                             \
  template Real BinaryAccuracyBound<Real>(const RatioPair&, int64_t);        \
  template absl::StatusOr<Real> NLeakedBinary<Real>(const RatioPair&,        \
                                                    const Real&);            \
  template absl::StatusOr<Real> ZipfAccuracyBound<Real>(                     \
      const ZipfSpec&, const ZipfSpec&, int64_t);                            \
  template absl::StatusOr<Real> NLeakedDegree<Real>(                         \
      const ZipfSpec&, const ZipfSpec&, const Real&);

DISTINF_INSTANTIATE_LEAKAGE(double)
DISTINF_INSTANTIATE_LEAKAGE(long double)
DISTINF_INSTANTIATE_LEAKAGE(HighPrecision)

#undef DISTINF_INSTANTIATE_LEAKAGE

}  // namespace distinf
