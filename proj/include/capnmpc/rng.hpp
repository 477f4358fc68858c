// Copyright 2026 The capnmpc Authors
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

#ifndef CAPNMPC__RNG_HPP_
#define CAPNMPC__RNG_HPP_

#include <cstdint>
#include <limits>

namespace capnmpc {

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

/// Counter-based stream factory. Every (call, step, index) triple maps to an
/// independent SplitMix64 stream, so draws do not depend on evaluation order
/// or thread count. `next_call()` advances the per-solve counter.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  SplitMix64 stream(std::uint64_t call, std::uint64_t step, std::uint64_t index) const;

  std::uint64_t next_call() { return calls_++; }
  std::uint64_t calls() const { return calls_; }
  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

/// Uniform draw in [0, 1) with 53 bits of mantissa.
double uniform01(SplitMix64 & gen);

}  // namespace capnmpc

#endif  // CAPNMPC__RNG_HPP_
