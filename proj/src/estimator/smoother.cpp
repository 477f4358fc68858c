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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "capnmpc/errors.hpp"
#include "capnmpc/estimator.hpp"
#include "capnmpc/kernels.hpp"
#include "capnmpc/parallel.hpp"

namespace capnmpc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Terms more than this far below the running max contribute < 1e-26 relative.
constexpr double kLogCutoff = 60.0;

// A kernel sum with a fused single pass first tries `bound`, an upper bound
// on every term. If the sum is small, terms dropped by the cutoff may matter
// relative to the true max, so it falls back to an exact max-then-sum pass.
constexpr double kMinBoundedSum = 4.5e-5;  // about e^-10

// Point set stored as columns sorted by the first coordinate. Under the
// bounded pass a term can only survive the cutoff when scale * dx0^2 <
// cutoff, so each query scans a window found by binary search.
struct SortedPoints {
  std::size_t n = 0;
  std::size_t dims = 0;
  std::vector<std::size_t> order;
  std::vector<double> columns;

  SortedPoints(const std::vector<double> & rows, std::size_t count, std::size_t d)
  : n(count), dims(d), order(count), columns(count * d)
  {
    for (std::size_t i = 0; i < n; ++i) {
      order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rows[a * dims] < rows[b * dims];
    });
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t k = 0; k < dims; ++k) {
        columns[k * n + s] = rows[order[s] * dims + k];
      }
    }
  }

  std::vector<double> permute(std::span<const double> values) const
  {
    std::vector<double> out(n);
    for (std::size_t s = 0; s < n; ++s) {
      out[s] = values[order[s]];
    }
    return out;
  }

  const double * column(std::size_t k) const { return columns.data() + k * n; }
};

class KernelLse
{
public:
  KernelLse(
    const kernels::KernelTable & kernels, const SortedPoints & points, std::span<const double> offset,
    double scale)
  : kernels_(kernels), points_(points), offset_(offset), scale_(scale),
    radius_(std::sqrt(kLogCutoff / scale) * (1.0 + 1e-9)), full_(points.dims), window_(points.dims),
    sq_(points.n), terms_(points.n)
  {
    bound_ = kNegInf;
    for (double v : offset_) {
      bound_ = std::max(bound_, v);
    }
    for (std::size_t k = 0; k < points.dims; ++k) {
      full_[k] = points.column(k);
    }
  }

  double operator()(std::span<const double> point)
  {
    if (bound_ == kNegInf) {
      return kNegInf;
    }
    const double * first = points_.column(0);
    const double * lo = std::lower_bound(first, first + points_.n, point[0] - radius_);
    const double * hi = std::upper_bound(lo, first + points_.n, point[0] + radius_);
    const auto begin = static_cast<std::size_t>(lo - first);
    const auto count = static_cast<std::size_t>(hi - lo);
    for (std::size_t k = 0; k < points_.dims; ++k) {
      window_[k] = full_[k] + begin;
    }
    const double sum = kernels_.kernel_sum_exp(
      window_, point, offset_.subspan(begin, count), scale_, bound_, kLogCutoff);
    if (sum >= kMinBoundedSum) {
      return bound_ + std::log(sum);
    }
    kernels_.squared_distances(full_, point, sq_);
    const double max_term = kernels_.offset_scaled_max(offset_, sq_, scale_, terms_);
    if (max_term == kNegInf) {
      return kNegInf;
    }
    return max_term + std::log(kernels_.sum_exp_above(terms_, max_term, kLogCutoff));
  }

private:
  const kernels::KernelTable & kernels_;
  const SortedPoints & points_;
  std::span<const double> offset_;
  double scale_;
  double radius_;
  double bound_;
  std::vector<const double *> full_;
  std::vector<const double *> window_;
  std::vector<double> sq_;
  std::vector<double> terms_;
};

double finite_max(std::span<const double> values)
{
  double best = kNegInf;
  for (double v : values) {
    if (v > best) {
      best = v;
    }
  }
  return best;
}

double log_sum_exp(const kernels::KernelTable & kernels, std::span<const double> values)
{
  const double max_value = finite_max(values);
  if (max_value == kNegInf) {
    return kNegInf;
  }
  return max_value + std::log(kernels.sum_exp_above(values, max_value, kLogCutoff));
}

}  // namespace

// Backward recursion, for t = k+H-1 .. k:
//
//   W_{t|H}^i = W_t^i * sum_j W_{t+1|H}^j p(x_{t+1}^j | x_t^i) / D_j,
//   D_j       = sum_l W_t^l p(x_{t+1}^j | x_t^l).
//
// The control factor of p depends on j only and cancels between numerator
// and D_j, as do the Gaussian normalizers, so only the state kernel
// exp(-|x_{t+1}^j - f(x_t^i)|^2 / 2 eps) is evaluated.
SmoothedWeights backward_smooth(const ParticleHistory & history, const SolverConfig & cfg)
{
  const std::size_t steps = history.steps.size();
  const std::size_t n = history.particles;
  const std::size_t nx = history.state_dim;
  SmoothedWeights out;
  out.log_weights.resize(steps);
  out.weights.resize(steps);
  if (steps == 0) {
    return out;
  }
  out.log_weights[steps - 1] = history.steps[steps - 1].log_weights;
  out.weights[steps - 1] = history.steps[steps - 1].weights;

  const auto & kernels = kernels::active_kernels();
  const double variance = cfg.smoother_bandwidth * cfg.smoother_bandwidth;
  const double inv_two_var = 1.0 / (2.0 * variance);

  for (std::size_t t = steps - 1; t-- > 0;) {
    const ParticleStep & cur = history.steps[t];
    const ParticleStep & nxt = history.steps[t + 1];
    const std::vector<double> & next_smoothed = out.log_weights[t + 1];

    const SortedPoints pred_points(cur.predicted, n, nx);
    const SortedPoints next_points(nxt.states, n, nx);

    // log D_j
    std::vector<double> coeff(n);
    const std::vector<double> sorted_log_weights = pred_points.permute(cur.log_weights);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      KernelLse lse(kernels, pred_points, sorted_log_weights, inv_two_var);
      for (std::size_t j = begin; j < end; ++j) {
        if (next_smoothed[j] == kNegInf) {
          coeff[j] = kNegInf;
          continue;
        }
        coeff[j] = next_smoothed[j] - lse(std::span<const double>(nxt.states.data() + j * nx, nx));
      }
    });
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isnan(coeff[j]) || coeff[j] == std::numeric_limits<double>::infinity()) {
        throw DegenerateSmoothingError(t);
      }
    }

    std::vector<double> log_w(n);
    const std::vector<double> sorted_coeff = next_points.permute(coeff);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      KernelLse lse(kernels, next_points, sorted_coeff, inv_two_var);
      for (std::size_t i = begin; i < end; ++i) {
        if (cur.log_weights[i] == kNegInf) {
          log_w[i] = kNegInf;
          continue;
        }
        log_w[i] = cur.log_weights[i] + lse(std::span<const double>(cur.predicted.data() + i * nx, nx));
      }
    });

    const double log_norm = log_sum_exp(kernels, log_w);
    if (!std::isfinite(log_norm)) {
      throw DegenerateSmoothingError(t);
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      log_w[i] -= log_norm;
      w[i] = std::exp(log_w[i]);
    }
    out.log_weights[t] = std::move(log_w);
    out.weights[t] = std::move(w);
  }
  return out;
}

AugmentedParticle point_estimate(
  const ParticleHistory & history, std::size_t t, std::span<const double> weights)
{
  const ParticleStep & step = history.steps.at(t);
  const std::size_t nx = history.state_dim;
  const std::size_t nu = history.control_dim;
  AugmentedParticle mean;
  mean.state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx));
  mean.control = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nu));
  for (std::size_t i = 0; i < history.particles; ++i) {
    const double w = weights[i];
    if (w == 0.0) {
      continue;
    }
    mean.state += w * Eigen::Map<const Eigen::VectorXd>(step.states.data() + i * nx, nx);
    mean.control += w * Eigen::Map<const Eigen::VectorXd>(step.controls.data() + i * nu, nu);
  }
  mean.log_weight = 0.0;
  return mean;
}

}  // namespace capnmpc
