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

#include "capnmpc/rng.hpp"

namespace capnmpc {
namespace {

std::uint64_t mix(std::uint64_t z)
{
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  return z ^ (z >> 33);
}

}  // namespace

SplitMix64 CounterRng::stream(std::uint64_t call, std::uint64_t step, std::uint64_t index) const
{
  std::uint64_t key = mix(seed_ ^ 0x243f6a8885a308d3ULL);
  key = mix(key ^ (call + 0x13198a2e03707344ULL));
  key = mix(key ^ (step + 0xa4093822299f31d0ULL));
  key = mix(key ^ (index + 0x082efa98ec4e6c89ULL));
  return SplitMix64(key);
}

double uniform01(SplitMix64 & gen)
{
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace capnmpc
