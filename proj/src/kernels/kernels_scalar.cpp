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

#include <algorithm>
#include <cmath>
#include <limits>

namespace capnmpc::kernels {
namespace {

void dense_scalar(
  std::span<const double> weights, std::span<const double> bias, std::span<const double> in,
  std::span<double> out, bool relu)
{
  const std::size_t cols = in.size();
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double * row = weights.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      acc += row[c] * in[c];
    }
    acc += bias[r];
    out[r] = (relu && acc < 0.0) ? 0.0 : acc;
  }
}

void squared_distances_scalar(
  std::span<const double * const> columns, std::span<const double> point, std::span<double> out)
{
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t d = 0; d < point.size(); ++d) {
    const double * col = columns[d];
    const double p = point[d];
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double diff = col[i] - p;
      out[i] += diff * diff;
    }
  }
}

double offset_scaled_max_scalar(
  std::span<const double> offset, std::span<const double> sq, double scale, std::span<double> out)
{
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = offset[i] - scale * sq[i];
    best = std::max(best, out[i]);
  }
  return best;
}

double sum_exp_above_scalar(std::span<const double> values, double shift, double cutoff)
{
  double sum = 0.0;
  for (double v : values) {
    const double shifted = v - shift;
    if (shifted > -cutoff) {
      sum += std::exp(shifted);
    }
  }
  return sum;
}

double kernel_sum_exp_scalar(
  std::span<const double * const> columns, std::span<const double> point,
  std::span<const double> offset, double scale, double shift, double cutoff)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < offset.size(); ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < point.size(); ++d) {
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

const KernelTable & scalar_kernels()
{
  static const KernelTable table{
    Isa::scalar, &dense_scalar, &squared_distances_scalar, &offset_scaled_max_scalar,
    &sum_exp_above_scalar, &kernel_sum_exp_scalar};
  return table;
}

}  // namespace capnmpc::kernels
