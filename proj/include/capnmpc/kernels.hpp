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

#ifndef CAPNMPC__KERNELS_HPP_
#define CAPNMPC__KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops of the estimator and the MLP. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2/FMA variant. The
// variant is picked once per process from CPUID; setting CAPNMPC_SIMD=scalar
// forces the reference path.

namespace capnmpc::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // out[r] = bias[r] + sum_c weights[r * cols + c] * in[c], optionally
  // clipped at zero. `out.size()` is the row count, `in.size()` the column count.
  void (*dense)(
    std::span<const double> weights, std::span<const double> bias, std::span<const double> in,
    std::span<double> out, bool relu);

  // out[i] = sum_d (columns[d][i] - point[d])^2 over a structure-of-arrays
  // point set. columns.size() == point.size(); every column has out.size() entries.
  void (*squared_distances)(
    std::span<const double * const> columns, std::span<const double> point, std::span<double> out);

  // out[i] = offset[i] - scale * sq[i]; returns max_i out[i] (-inf when empty).
  double (*offset_scaled_max)(
    std::span<const double> offset, std::span<const double> sq, double scale, std::span<double> out);

  // sum_i exp(values[i] - shift) over entries with values[i] - shift > -cutoff.
  double (*sum_exp_above)(std::span<const double> values, double shift, double cutoff);

  // Fused kernel sum: with term_i = offset[i] - scale * |columns[.][i] - point|^2,
  // returns sum_i exp(term_i - shift) over terms with term_i - shift > -cutoff.
  // One pass, no temporaries; offset.size() is the point count.
  double (*kernel_sum_exp)(
    std::span<const double * const> columns, std::span<const double> point,
    std::span<const double> offset, double scale, double shift, double cutoff);
};

const KernelTable & scalar_kernels();

/// AVX2/FMA table, or nullptr when not compiled in or unsupported by the CPU.
const KernelTable * avx2_kernels();

/// Table used by the library. Resolved once; thread-safe.
const KernelTable & active_kernels();

}  // namespace capnmpc::kernels

#endif  // CAPNMPC__KERNELS_HPP_
