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

#include "sumbias/rng.h"

#include <numeric>

namespace sumbias {

uint64_t Fnv1a64(std::string_view text, uint64_t basis) {
  uint64_t h = basis;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t master, std::string_view stage,
                    std::string_view id, uint64_t index) {
  uint64_t h = Mix64(master);
  h = Mix64(h ^ Fnv1a64(stage));
  h = Mix64(h ^ Fnv1a64(id));
  return Mix64(h ^ Mix64(index));
}

uint64_t Rng::UniformIndex(uint64_t n) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % n;
}

std::vector<size_t> Rng::SampleWithoutReplacement(size_t n, size_t k) {
  std::vector<size_t> pool(n);
  std::iota(pool.begin(), pool.end(), size_t{0});
  // Partial Fisher-Yates.
  for (size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + UniformIndex(n - i)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace sumbias
