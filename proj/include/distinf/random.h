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

// Seed derivation and a portable random stream.
//
// std::mt19937_64 is fully specified by the standard, but the std
// distributions are not, so every transform from raw 64-bit words to
// uniforms, normals, indices and shuffles is defined here. Together with
// MixSeed this makes every sampled quantity in the library bit-identical
// across platforms and standard libraries.

#ifndef DISTINF_RANDOM_H_
#define DISTINF_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace distinf {

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Folds the words in order: h = Mix64(h ^ Mix64(word + k)) per position k.
// Distinct tuples give independent-looking seeds; MixSeed({a}) != a.
uint64_t MixSeed(std::initializer_list<uint64_t> words);

// Tags salting substreams by purpose.
enum class StreamTag : uint64_t {
  kVictimPool = 0x5649435449'4dULL,
  kAdversaryPool = 0x4144564552'53ULL,
  kShuffle = 0x5348554646'4cULL,
  kInit = 0x494e4954ULL,
  kTestSet = 0x5445535453ULL,
  kMeta = 0x4d455441ULL,
  kRule = 0x52554c45ULL,
  kMonteCarlo = 0x4d43ULL,
};

inline uint64_t Tag(StreamTag tag) { return static_cast<uint64_t>(tag); }

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextWord() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1].
  double UniformOpenLeft() { return 1.0 - Uniform(); }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();

  // Uniform integer in [0, n), unbiased by rejection. n must be > 0.
  uint64_t UniformIndex(uint64_t n);

  // Fisher-Yates.
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformIndex(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace distinf

#endif  // DISTINF_RANDOM_H_
