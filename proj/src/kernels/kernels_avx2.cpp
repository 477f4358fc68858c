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

#include "capnmpc/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace capnmpc::kernels {
namespace {

inline double hsum(__m256d v)
{
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v)
{
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

void dense_avx2(
  std::span<const double> weights, std::span<const double> bias, std::span<const double> in,
  std::span<double> out, bool relu)
{
  const std::size_t cols = in.size();
  const std::size_t vec_end = cols & ~std::size_t{7};
  const double * x = in.data();
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double * row = weights.data() + r * cols;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c < vec_end; c += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4), _mm256_loadu_pd(x + c + 4), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; c < cols; ++c) {
      acc += row[c] * x[c];
    }
    acc += bias[r];
    out[r] = (relu && acc < 0.0) ? 0.0 : acc;
  }
}

void squared_distances_avx2(
  std::span<const double * const> columns, std::span<const double> point, std::span<double> out)
{
  const std::size_t n = out.size();
  const std::size_t dims = point.size();
  const std::size_t vec_end = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < vec_end; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dims; ++d) {
      const __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(columns[d] + i), _mm256_set1_pd(point[d]));
      acc = _mm256_fmadd_pd(diff, diff, acc);
    }
    _mm256_storeu_pd(out.data() + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = columns[d][i] - point[d];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

double offset_scaled_max_avx2(
  std::span<const double> offset, std::span<const double> sq, double scale, std::span<double> out)
{
  const std::size_t n = out.size();
  const std::size_t vec_end = n & ~std::size_t{3};
  const __m256d s = _mm256_set1_pd(scale);
  __m256d best_v = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i < vec_end; i += 4) {
    const __m256d v =
      _mm256_fnmadd_pd(s, _mm256_loadu_pd(sq.data() + i), _mm256_loadu_pd(offset.data() + i));
    _mm256_storeu_pd(out.data() + i, v);
    best_v = _mm256_max_pd(best_v, v);
  }
  double best = hmax(best_v);
  for (; i < n; ++i) {
    out[i] = offset[i] - scale * sq[i];
    best = std::max(best, out[i]);
  }
  return best;
}

// Only lanes above the cutoff pay for an exp. Accumulation runs in index
// order like the scalar kernel.
double sum_exp_above_avx2(std::span<const double> values, double shift, double cutoff)
{
  const std::size_t n = values.size();
  const std::size_t vec_end = n & ~std::size_t{3};
  const __m256d floor = _mm256_set1_pd(shift - cutoff);
  double sum = 0.0;
  std::size_t i = 0;
  for (; i < vec_end; i += 4) {
    const __m256d v = _mm256_loadu_pd(values.data() + i);
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, floor, _CMP_GT_OQ));
    while (mask != 0) {
      const int lane = __builtin_ctz(static_cast<unsigned>(mask));
      const double shifted = values[i + static_cast<std::size_t>(lane)] - shift;
      if (shifted > -cutoff) {
        sum += std::exp(shifted);
      }
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    const double shifted = values[i] - shift;
    if (shifted > -cutoff) {
      sum += std::exp(shifted);
    }
  }
  return sum;
}

// exp for arguments in roughly [-700, 0]: x = n ln2 + r with |r| <= ln2 / 2,
// exp(r) by a degree-13 Taylor polynomial, 2^n spliced into the exponent
// bits. Within a few ulp of std::exp over that range.
inline __m256d exp_nonpositive(__m256d x)
{
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);
  static constexpr double kInvFactorial[] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
    1.0 / 362880.0, 1.0 / 40320.0, 1.0 / 5040.0, 1.0 / 720.0, 1.0 / 120.0, 1.0 / 24.0,
    1.0 / 6.0, 0.5, 1.0, 1.0};
  __m256d p = _mm256_set1_pd(kInvFactorial[0]);
  for (std::size_t k = 1; k < std::size(kInvFactorial); ++k) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFactorial[k]));
  }
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i bits = _mm256_slli_epi64(_mm256_cvtepi32_epi64(n32), 52);
  return _mm256_castsi256_pd(_mm256_add_epi64(_mm256_castpd_si256(p), bits));
}

double kernel_sum_exp_avx2(
  std::span<const double * const> columns, std::span<const double> point,
  std::span<const double> offset, double scale, double shift, double cutoff)
{
  const std::size_t n = offset.size();
  const std::size_t dims = point.size();
  const std::size_t vec_end = n & ~std::size_t{3};
  const __m256d s = _mm256_set1_pd(scale);
  const __m256d floor = _mm256_set1_pd(shift - cutoff);
  const __m256d shift_v = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < vec_end; i += 4) {
    __m256d sq = _mm256_setzero_pd();
    for (std::size_t d = 0; d < dims; ++d) {
      const __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(columns[d] + i), _mm256_set1_pd(point[d]));
      sq = _mm256_fmadd_pd(diff, diff, sq);
    }
    const __m256d term = _mm256_fnmadd_pd(s, sq, _mm256_loadu_pd(offset.data() + i));
    const __m256d keep = _mm256_cmp_pd(term, floor, _CMP_GT_OQ);
    if (_mm256_movemask_pd(keep) == 0) {
      continue;
    }
    // Dropped lanes are clamped first so the exponent splice stays in range.
    const __m256d shifted = _mm256_max_pd(_mm256_sub_pd(term, shift_v), _mm256_set1_pd(-700.0));
    acc = _mm256_add_pd(acc, _mm256_and_pd(keep, exp_nonpositive(shifted)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = columns[d][i] - point[d];
      sq += diff * diff;
    }
    const double shifted = (offset[i] - scale * sq) - shift;
    if (shifted > -cutoff) {
      sum += std::exp(shifted);
    }
  }
  return sum;
}

}  // namespace

const KernelTable & avx2_kernel_table()
{
  static const KernelTable table{
    Isa::avx2, &dense_avx2, &squared_distances_avx2, &offset_scaled_max_avx2,
    &sum_exp_above_avx2, &kernel_sum_exp_avx2};
  return table;
}

}  // namespace capnmpc::kernels
