// Copyright 2026 The sumbias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUMBIAS_RNG_H_
#define SUMBIAS_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sumbias {

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view text, uint64_t basis = 0xcbf29ce484222325ULL);

// SplitMix64 finalizer; used to decorrelate derived seeds.
uint64_t Mix64(uint64_t x);

// Derives a child seed from a master seed and a named path such as
// ("generate", original id, pair index). Same inputs, same seed, on every
// platform.
uint64_t DeriveSeed(uint64_t master, std::string_view stage,
                    std::string_view id = {}, uint64_t index = 0);

// Random source with platform-independent draws. std::mt19937_64's output
// sequence is fixed by the standard but the std:: distributions are not,
// so bounded integers and doubles are produced here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t UniformIndex(uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Uniform01() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformIndex(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order. Requires k <= n.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sumbias

#endif  // SUMBIAS_RNG_H_
