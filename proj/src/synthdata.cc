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

#include "distinf/synthdata.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_format.h"
#include "distinf/status.h"

namespace distinf {
namespace {

std::vector<double> RandomDirection(Rng& rng, int dims, double norm) {
  std::vector<double> v(dims);
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& x : v) {
      x = rng.Normal();
      sq += x * x;
    }
  } while (sq == 0.0);
  const double scale = norm / std::sqrt(sq);
  for (double& x : v) x *= scale;
  return v;
}

uint64_t PoolTag(Pool pool) {
  return pool == Pool::kVictim ? Tag(StreamTag::kVictimPool)
                               : Tag(StreamTag::kAdversaryPool);
}

std::vector<int> ExactCountBits(int64_t m, int64_t positives, Rng& rng) {
  std::vector<int> bits(m, 0);
  std::fill(bits.begin(), bits.begin() + positives, 1);
  rng.Shuffle(std::span<int>(bits));
  return bits;
}

std::string FeatureKey(const std::vector<double>& features) {
  std::string key(features.size() * sizeof(double), '\0');
  std::memcpy(key.data(), features.data(), key.size());
  return key;
}

}  // namespace

absl::Status ValidateUnderlyingSpec(const UnderlyingSpec& spec) {
  if (spec.noise_dims < 1 || spec.signal_dims < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "noise_dims and signal_dims must be >= 1");
  }
  if (!std::isfinite(spec.signal_strength) || spec.signal_strength < 0.0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "signal_strength must be finite and >= 0");
  }
  if (!(spec.label_property_coupling >= 0.0 &&
        spec.label_property_coupling <= 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "label_property_coupling must lie in [0, 1]");
  }
  return absl::OkStatus();
}

PlantedRule MakePlantedRule(const UnderlyingSpec& spec) {
  Rng rng(MixSeed({spec.rule_seed, Tag(StreamTag::kRule)}));
  PlantedRule rule;
  rule.label_direction = RandomDirection(rng, spec.noise_dims, kLabelShift);
  rule.cross_direction = RandomDirection(rng, spec.signal_dims, 1.0);
  return rule;
}

absl::StatusOr<Dataset> SampleDataset(const RatioDistributionSpec& spec,
                                      int64_t m, uint64_t seed, Pool pool,
                                      SamplingMode mode) {
  DISTINF_RETURN_IF_ERROR(ValidateUnderlyingSpec(spec.underlying));
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrFormat("alpha=%g outside [0, 1]", spec.alpha));
  }
  if (m < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "m must be positive");
  }
  const UnderlyingSpec& u = spec.underlying;
  const PlantedRule rule = MakePlantedRule(u);
  const uint64_t pool_tag = PoolTag(pool);

  std::vector<int> exact_properties;
  std::vector<int> exact_labels;
  if (mode == SamplingMode::kExactCount) {
    Rng shuffle_rng(MixSeed({seed, pool_tag, Tag(StreamTag::kShuffle)}));
    const auto positives = static_cast<int64_t>(std::llround(spec.alpha * m));
    exact_properties = ExactCountBits(m, positives, shuffle_rng);
    exact_labels = ExactCountBits(m, m / 2, shuffle_rng);
  }

  Dataset dataset;
  dataset.pool = pool;
  dataset.seed = seed;
  dataset.spec = spec;
  dataset.records.resize(m);
  for (int64_t i = 0; i < m; ++i) {
    Rng rng(MixSeed({seed, pool_tag, static_cast<uint64_t>(i)}));
    Record& r = dataset.records[i];
    if (mode == SamplingMode::kIid) {
      r.property = rng.Bernoulli(spec.alpha) ? 1 : 0;
      r.label = rng.Bernoulli(0.5) ? 1 : 0;
    } else {
      r.property = exact_properties[i];
      r.label = exact_labels[i];
    }
    r.features.resize(u.feature_dims());
    for (double& x : r.features) x = rng.Normal();

    for (int j = 0; j < u.noise_dims; ++j) {
      r.features[j] += r.label * rule.label_direction[j];
    }
    const double property_sign = 2.0 * r.property - 1.0;
    const double cross = u.label_property_coupling * kCrossShift *
                         (2.0 * r.label - 1.0) * property_sign;
    for (int j = 0; j < u.signal_dims; ++j) {
      r.features[u.noise_dims + j] += u.signal_strength * property_sign +
                                      cross * rule.cross_direction[j];
    }
  }
  return dataset;
}

double EmpiricalRatio(const Dataset& dataset) {
  int64_t positives = 0;
  for (const Record& r : dataset.records) positives += r.property;
  return static_cast<double>(positives) / dataset.records.size();
}

double EmpiricalLabelMean(const Dataset& dataset) {
  int64_t positives = 0;
  for (const Record& r : dataset.records) positives += r.label;
  return static_cast<double>(positives) / dataset.records.size();
}

bool CheckPoolDisjointness(std::span<const Dataset* const> a,
                           std::span<const Dataset* const> b) {
  absl::flat_hash_set<std::string> seen;
  for (const Dataset* d : a) {
    for (const Record& r : d->records) seen.insert(FeatureKey(r.features));
  }
  for (const Dataset* d : b) {
    for (const Record& r : d->records) {
      if (seen.contains(FeatureKey(r.features))) return false;
    }
  }
  return true;
}

bool CheckPoolDisjointness(const Dataset& a, const Dataset& b) {
  const Dataset* pa[] = {&a};
  const Dataset* pb[] = {&b};
  return CheckPoolDisjointness(pa, pb);
}

ZipfSampler::ZipfSampler(const ZipfSpec& spec) : spec_(spec) {
  const int64_t n = std::max<int64_t>(spec.n_elems, 1);
  std::vector<long double> weights(n);
  for (int64_t k = 1; k <= n; ++k) {
    weights[k - 1] = std::pow(static_cast<long double>(k), -spec.exponent);
  }
  long double total = 0;
  for (int64_t k = n; k >= 1; --k) total += weights[k - 1];
  cdf_.resize(n);
  long double running = 0;
  for (int64_t k = 0; k < n; ++k) {
    running += weights[k];
    cdf_[k] = static_cast<double>(running / total);
  }
  cdf_.back() = 1.0;
}

int64_t ZipfSampler::Sample(Rng& rng) const {
  const double u = rng.Uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int64_t>(it - cdf_.begin()) + 1;
}

absl::StatusOr<std::vector<int64_t>> SampleDegrees(const ZipfSpec& spec,
                                                   int64_t n, uint64_t seed) {
  DISTINF_RETURN_IF_ERROR(ValidateZipfSpec(spec));
  if (n < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "n must be positive");
  }
  const ZipfSampler sampler(spec);
  Rng rng(seed);
  std::vector<int64_t> draws(n);
  for (int64_t& d : draws) d = sampler.Sample(rng);
  return draws;
}

}  // namespace distinf
