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

#include <cstdlib>
#include <string_view>

#include "capnmpc/kernels.hpp"

namespace capnmpc::kernels {

#ifdef CAPNMPC_WITH_AVX2
const KernelTable & avx2_kernel_table();
#endif

std::string_view isa_name(Isa isa)
{
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable * avx2_kernels()
{
#ifdef CAPNMPC_WITH_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable & active_kernels()
{
  static const KernelTable & table = []() -> const KernelTable & {
    const char * forced = std::getenv("CAPNMPC_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return scalar_kernels();
    }
    if (const KernelTable * avx2 = avx2_kernels()) {
      return *avx2;
    }
    return scalar_kernels();
  }();
  return table;
}

}  // namespace capnmpc::kernels
