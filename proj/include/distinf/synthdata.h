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

// Synthetic underlying distribution D and its ratio transforms G_alpha(D).
//
// A record carries a property bit c ~ Bernoulli(alpha), a label bit
// y ~ Bernoulli(1/2) drawn independently of c, and a feature vector
// x = z + shift(y, c) with z standard normal. The feature vector has two
// blocks:
//
//   noise block  (noise_dims)   += y * w
//   signal block (signal_dims)  += signal_strength * (2c - 1) * 1
//                                + coupling * kCrossShift * (2y - 1)(2c - 1) * v
//
// where w (norm kLabelShift) and v (unit norm) are fixed by rule_seed. The
// conditional p(x | c) is the same for every alpha; only the prior moves.
// coupling = 0 makes the property invisible to the label rule (a latent
// property); coupling > 0 flips the label's effect on the signal block
// between the two property groups, so a model fitted to one group degrades
// on the other.
//
// This generator is the library's own construction, not a model of any real
// dataset.

#ifndef DISTINF_SYNTHDATA_H_
#define DISTINF_SYNTHDATA_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "distinf/leakage.h"
#include "distinf/random.h"

namespace distinf {

inline constexpr double kLabelShift = 2.0;
inline constexpr double kCrossShift = 1.5;

struct UnderlyingSpec {
  int noise_dims = 4;
  int signal_dims = 2;
  double signal_strength = 1.0;
  double label_property_coupling = 1.0;
  uint64_t rule_seed = 0;

  int feature_dims() const { return noise_dims + signal_dims; }
};

// Dims >= 1, signal_strength finite and >= 0, coupling in [0, 1].
absl::Status ValidateUnderlyingSpec(const UnderlyingSpec& spec);

struct RatioDistributionSpec {
  UnderlyingSpec underlying;
  double alpha = 0.5;
};

struct Record {
  std::vector<double> features;
  int label = 0;
  int property = 0;
};

enum class Pool { kVictim, kAdversary };

enum class SamplingMode {
  kIid,         // property and label drawn per record
  kExactCount,  // round(alpha m) positives and floor(m/2) labels, shuffled
};

struct Dataset {
  std::vector<Record> records;
  Pool pool = Pool::kVictim;
  uint64_t seed = 0;
  RatioDistributionSpec spec;

  int feature_dims() const {
    return records.empty() ? 0 : static_cast<int>(records[0].features.size());
  }
  size_t size() const { return records.size(); }
};

// The fixed directions derived from rule_seed.
struct PlantedRule {
  std::vector<double> label_direction;  // noise block, norm kLabelShift
  std::vector<double> cross_direction;  // signal block, unit norm
};
PlantedRule MakePlantedRule(const UnderlyingSpec& spec);

// Record i of a dataset uses the substream MixSeed(seed, pool tag, i), so
// records never depend on m (in kIid mode) and the two pools never share a
// stream.
absl::StatusOr<Dataset> SampleDataset(const RatioDistributionSpec& spec,
                                      int64_t m, uint64_t seed, Pool pool,
                                      SamplingMode mode = SamplingMode::kIid);

// Fraction of records with property = 1. Dataset must be nonempty.
double EmpiricalRatio(const Dataset& dataset);

// Fraction of records with label = 1. Dataset must be nonempty.
double EmpiricalLabelMean(const Dataset& dataset);

// True iff no feature vector occurs (bitwise) in both datasets.
bool CheckPoolDisjointness(const Dataset& a, const Dataset& b);

// Pool-level version: no feature vector of any dataset in `a` occurs in any
// dataset of `b`.
bool CheckPoolDisjointness(std::span<const Dataset* const> a,
                           std::span<const Dataset* const> b);

// Inverse-CDF sampler over a finite Zipf support.
class ZipfSampler {
 public:
  explicit ZipfSampler(const ZipfSpec& spec);

  int64_t Sample(Rng& rng) const;
  const ZipfSpec& spec() const { return spec_; }

 private:
  ZipfSpec spec_;
  std::vector<double> cdf_;  // cdf_[k-1] = Pr[X <= k]; back() == 1
};

// n iid draws from pmf k^-s / H(N, s).
absl::StatusOr<std::vector<int64_t>> SampleDegrees(const ZipfSpec& spec,
                                                   int64_t n, uint64_t seed);

}  // namespace distinf

#endif  // DISTINF_SYNTHDATA_H_
