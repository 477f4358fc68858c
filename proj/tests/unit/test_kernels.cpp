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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "capnmpc/kernels.hpp"

namespace capnmpc::kernels {
namespace {

std::vector<double> random_vector(std::mt19937_64 & gen, std::size_t n, double lo, double hi)
{
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double & x : v) {
    x = dist(gen);
  }
  return v;
}

void expect_close(double a, double b, double rel)
{
  EXPECT_LE(std::abs(a - b), rel * std::max({1.0, std::abs(a), std::abs(b)})) << a << " vs " << b;
}

class KernelEquivalence : public ::testing::Test {
protected:
  void SetUp() override
  {
    simd_ = avx2_kernels();
    if (simd_ == nullptr) {
      GTEST_SKIP() << "AVX2 kernels not available on this host";
    }
  }

  const KernelTable & ref_ = scalar_kernels();
  const KernelTable * simd_ = nullptr;
  std::mt19937_64 gen_{42};
};

TEST_F(KernelEquivalence, DenseMatchesAcrossShapesAndTails)
{
  for (std::size_t rows : {1u, 3u, 8u, 17u}) {
    for (std::size_t cols : {1u, 4u, 7u, 8u, 9u, 33u}) {
      const auto w = random_vector(gen_, rows * cols, -1.0, 1.0);
      const auto b = random_vector(gen_, rows, -1.0, 1.0);
      const auto x = random_vector(gen_, cols, -2.0, 2.0);
      for (bool relu : {false, true}) {
        std::vector<double> a(rows);
        std::vector<double> s(rows);
        ref_.dense(w, b, x, a, relu);
        simd_->dense(w, b, x, s, relu);
        for (std::size_t r = 0; r < rows; ++r) {
          expect_close(a[r], s[r], 1e-13);
          if (relu) {
            EXPECT_GE(s[r], 0.0);
          }
        }
      }
    }
  }
}

TEST_F(KernelEquivalence, SquaredDistancesMatch)
{
  for (std::size_t n : {1u, 3u, 4u, 5u, 64u, 1001u}) {
    for (std::size_t d : {1u, 2u, 4u}) {
      std::vector<std::vector<double>> cols;
      std::vector<const double *> ptrs;
      for (std::size_t k = 0; k < d; ++k) {
        cols.push_back(random_vector(gen_, n, -5.0, 5.0));
      }
      for (const auto & c : cols) {
        ptrs.push_back(c.data());
      }
      const auto point = random_vector(gen_, d, -5.0, 5.0);
      std::vector<double> a(n);
      std::vector<double> s(n);
      ref_.squared_distances(ptrs, point, a);
      simd_->squared_distances(ptrs, point, s);
      for (std::size_t i = 0; i < n; ++i) {
        expect_close(a[i], s[i], 1e-14);
      }
    }
  }
}

TEST_F(KernelEquivalence, OffsetScaledMaxMatches)
{
  for (std::size_t n : {0u, 1u, 5u, 64u, 999u}) {
    const auto offset = random_vector(gen_, n, -30.0, 0.0);
    const auto sq = random_vector(gen_, n, 0.0, 2.0);
    std::vector<double> a(n);
    std::vector<double> s(n);
    const double ma = ref_.offset_scaled_max(offset, sq, 3.5, a);
    const double ms = simd_->offset_scaled_max(offset, sq, 3.5, s);
    if (n == 0) {
      EXPECT_EQ(ma, -INFINITY);
      EXPECT_EQ(ms, -INFINITY);
      continue;
    }
    expect_close(ma, ms, 1e-14);
    for (std::size_t i = 0; i < n; ++i) {
      expect_close(a[i], s[i], 1e-14);
    }
  }
}

TEST_F(KernelEquivalence, SumExpAboveMatches)
{
  for (std::size_t n : {1u, 3u, 4u, 7u, 500u}) {
    auto values = random_vector(gen_, n, -120.0, 0.0);
    values[0] = 0.0;
    expect_close(ref_.sum_exp_above(values, 0.0, 60.0), simd_->sum_exp_above(values, 0.0, 60.0), 1e-14);
  }
}

TEST_F(KernelEquivalence, KernelSumExpMatches)
{
  for (std::size_t n : {1u, 2u, 4u, 6u, 257u, 2000u}) {
    for (std::size_t d : {1u, 4u}) {
      std::vector<std::vector<double>> cols;
      std::vector<const double *> ptrs;
      for (std::size_t k = 0; k < d; ++k) {
        cols.push_back(random_vector(gen_, n, -0.2, 0.2));
      }
      for (const auto & c : cols) {
        ptrs.push_back(c.data());
      }
      const auto offset = random_vector(gen_, n, -40.0, 0.0);
      const auto point = random_vector(gen_, d, -0.2, 0.2);
      const double a = ref_.kernel_sum_exp(ptrs, point, offset, 500.0, 0.0, 60.0);
      const double s = simd_->kernel_sum_exp(ptrs, point, offset, 500.0, 0.0, 60.0);
      EXPECT_LE(std::abs(a - s), 1e-13 * a);
    }
  }
}

TEST(Kernels, ScalarKernelSumExpAgreesWithUnfusedPasses)
{
  const KernelTable & k = scalar_kernels();
  std::mt19937_64 gen(3);
  const std::size_t n = 300;
  const auto c0 = random_vector(gen, n, -1.0, 1.0);
  const auto c1 = random_vector(gen, n, -1.0, 1.0);
  const std::vector<const double *> ptrs{c0.data(), c1.data()};
  const auto offset = random_vector(gen, n, -5.0, 0.0);
  const std::vector<double> point{0.1, -0.2};
  std::vector<double> sq(n);
  std::vector<double> terms(n);
  k.squared_distances(ptrs, point, sq);
  const double max_term = k.offset_scaled_max(offset, sq, 2.0, terms);
  const double unfused = k.sum_exp_above(terms, max_term, 60.0) * std::exp(max_term);
  const double fused = k.kernel_sum_exp(ptrs, point, offset, 2.0, 0.0, 60.0);
  EXPECT_NEAR(fused, unfused, 1e-12 * unfused);
}

TEST(Kernels, CutoffDropsFarTerms)
{
  const KernelTable & k = scalar_kernels();
  const std::vector<double> values{0.0, -59.0, -61.0, -1000.0};
  EXPECT_DOUBLE_EQ(k.sum_exp_above(values, 0.0, 60.0), 1.0 + std::exp(-59.0));
}

TEST(Kernels, ActiveTableIsStableAndNamed)
{
  const KernelTable & a = active_kernels();
  EXPECT_EQ(&a, &active_kernels());
  EXPECT_FALSE(isa_name(a.isa).empty());
}

}  // namespace
}  // namespace capnmpc::kernels
