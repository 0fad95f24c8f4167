// Copyright 2026 The coatseg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Counter-based pseudo-random stream. Draw k (k = 0, 1, ...) of the stream
// (seed, stream) is
//
//   key    = Mix64(seed) ^ Mix64(stream + 0x9E3779B97F4A7C15)
//   raw_k  = Mix64(key + (k + 1) * 0x9E3779B97F4A7C15)      (mod 2^64)
//
// where Mix64 is the SplitMix64 finalizer. Derived draws:
//   Uniform()        (raw >> 11) * 2^-53                     in [0, 1)
//   UniformInt(a,b)  a + floor(Uniform() * (b - a + 1))
//   Normal()         sqrt(-2 ln(1 - u1)) * cos(2 pi u2), two draws
//
// The definition is fixed so fixtures can be regenerated bit-for-bit in any
// language. See docs/rng.md.

#ifndef COATSEG_RANDOM_H_
#define COATSEG_RANDOM_H_

#include <cstdint>

namespace coatseg {

std::uint64_t Mix64(std::uint64_t x);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t NextU64();
  double Uniform();
  int UniformInt(int lo, int hi);
  double Normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace coatseg

#endif  // COATSEG_RANDOM_H_
