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
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "capnmpc/errors.hpp"
#include "capnmpc/estimator.hpp"

namespace capnmpc {

double softplus_barrier(double s, double alpha, double beta)
{
  const double z = beta * s;
  if (z > 30.0) {
    // ln(1 + e^z) = z + ln(1 + e^-z), and e^-30 is below double resolution of z
    return z / alpha;
  }
  return std::log1p(std::exp(z)) / alpha;
}

double measurement_loglik(
  std::span<const double> state, std::span<const double> reference, std::span<const double> mask,
  std::span<const double> g, const SolverConfig & cfg)
{
  double tracking = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double precision = cfg.tracking_precision[static_cast<Eigen::Index>(i)] * mask[i];
    if (precision != 0.0) {
      const double e = state[i] - reference[i];
      tracking += precision * e * e;
    }
  }
  double barrier = 0.0;
  for (double gj : g) {
    const double phi = softplus_barrier(gj, cfg.alpha, cfg.beta);
    barrier += phi * phi;
  }
  const double value = -0.5 * tracking - barrier / (2.0 * cfg.eta_std * cfg.eta_std);
  if (std::isnan(value)) {
    return -std::numeric_limits<double>::infinity();
  }
  return value;
}

double measurement_loglik(
  const AugmentedParticle & p, const Eigen::VectorXd & reference, const Eigen::VectorXd & mask,
  std::span<const double> g, const SolverConfig & cfg)
{
  return measurement_loglik(
    std::span<const double>(p.state.data(), static_cast<std::size_t>(p.state.size())),
    std::span<const double>(reference.data(), static_cast<std::size_t>(reference.size())),
    std::span<const double>(mask.data(), static_cast<std::size_t>(mask.size())), g, cfg);
}

Eigen::MatrixXd control_noise_factor(const Eigen::MatrixXd & control_precision)
{
  const Eigen::LLT<Eigen::MatrixXd> llt(control_precision);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("Q", "control precision must be symmetric positive definite");
  }
  // Q = L L'  =>  Q^-1 = L^-T L^-1, so u = L^-T z has covariance Q^-1.
  const Eigen::MatrixXd lower = llt.matrixL();
  return lower.transpose().inverse();
}

AugmentedParticle propagate(
  const AugmentedParticle & p, const DynamicsModel & model, const SolverConfig & cfg, SplitMix64 & rng)
{
  AugmentedParticle next;
  next.state.resize(p.state.size());
  model.step(
    std::span<const double>(p.state.data(), static_cast<std::size_t>(p.state.size())),
    std::span<const double>(p.control.data(), static_cast<std::size_t>(p.control.size())), cfg.dt,
    std::span<double>(next.state.data(), static_cast<std::size_t>(next.state.size())));

  const Eigen::MatrixXd factor = control_noise_factor(cfg.control_precision);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(factor.cols());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    z[j] = normal(rng);
  }
  next.control = factor * z;
  next.log_weight = p.log_weight;
  return next;
}

double effective_sample_size(std::span<const double> weights)
{
  double sum_sq = 0.0;
  for (double w : weights) {
    sum_sq += w * w;
  }
  return 1.0 / sum_sq;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u)
{
  const std::size_t n = weights.size();
  std::vector<std::size_t> out(n);
  if (n == 0) {
    return out;
  }
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (weights[j] > 0.0) {
      last_positive = j;
    }
  }
  std::size_t j = 0;
  double cumulative = weights[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double threshold = (u + static_cast<double>(i)) / static_cast<double>(n);
    while (cumulative <= threshold && j < last_positive) {
      ++j;
      cumulative += weights[j];
    }
    out[i] = j;
  }
  return out;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, SplitMix64 & rng)
{
  return systematic_resample(weights, uniform01(rng));
}

double transition_logdensity(
  const AugmentedParticle & from, const AugmentedParticle & to, const DynamicsModel & model,
  const SolverConfig & cfg)
{
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  Eigen::VectorXd predicted(from.state.size());
  model.step(
    std::span<const double>(from.state.data(), static_cast<std::size_t>(from.state.size())),
    std::span<const double>(from.control.data(), static_cast<std::size_t>(from.control.size())),
    cfg.dt, std::span<double>(predicted.data(), static_cast<std::size_t>(predicted.size())));

  const Eigen::MatrixXd & q = cfg.control_precision;
  const double nu = static_cast<double>(to.control.size());
  const double log_det_q = 2.0 * Eigen::MatrixXd(Eigen::LLT<Eigen::MatrixXd>(q).matrixL())
                                   .diagonal().array().log().sum();
  const double control_term =
    -0.5 * to.control.dot(q * to.control) - 0.5 * nu * kLog2Pi + 0.5 * log_det_q;

  const double variance = cfg.smoother_bandwidth * cfg.smoother_bandwidth;
  const double nx = static_cast<double>(to.state.size());
  const double state_term = -(to.state - predicted).squaredNorm() / (2.0 * variance) -
                            0.5 * nx * (kLog2Pi + std::log(variance));
  return control_term + state_term;
}

}  // namespace capnmpc
