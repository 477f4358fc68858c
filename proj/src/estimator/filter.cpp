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
#include <random>
#include <string>

#include "capnmpc/errors.hpp"
#include "capnmpc/estimator.hpp"
#include "capnmpc/parallel.hpp"

namespace capnmpc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(
  const DynamicsModel & model, const ReferenceTrajectory & refs,
  std::span<const double> current_state, const SolverConfig & cfg)
{
  cfg.validate_for(model);
  if (refs.size() != cfg.horizon + 1) {
    throw ShapeError(
      "forward_filter: reference length " + std::to_string(refs.size()) + " != H+1 = " +
      std::to_string(cfg.horizon + 1));
  }
  for (std::size_t t = 0; t < refs.size(); ++t) {
    if (static_cast<std::size_t>(refs[t].state.size()) != model.state_dim() ||
        static_cast<std::size_t>(refs[t].mask.size()) != model.state_dim()) {
      throw ShapeError("forward_filter: reference " + std::to_string(t) + " has the wrong dimension");
    }
  }
  if (current_state.size() != model.state_dim()) {
    throw ShapeError("forward_filter: current state has the wrong dimension");
  }
}

// Normalizes log weights in place; returns false when every entry is -inf.
bool normalize_log_weights(std::vector<double> & log_w, std::vector<double> & w)
{
  double max_lw = kNegInf;
  for (double v : log_w) {
    max_lw = std::max(max_lw, v);
  }
  if (max_lw == kNegInf) {
    return false;
  }
  double sum = 0.0;
  for (double v : log_w) {
    sum += std::exp(v - max_lw);
  }
  const double log_norm = max_lw + std::log(sum);
  w.resize(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    log_w[i] -= log_norm;
    w[i] = std::exp(log_w[i]);
  }
  return true;
}

}  // namespace

ParticleHistory forward_filter(
  const DynamicsModel & model, const ConstraintEvaluator & constraints,
  const ReferenceTrajectory & refs, std::span<const double> current_state, const SolverConfig & cfg,
  const CounterRng & rng, const FilterOptions & options)
{
  check_inputs(model, refs, current_state, cfg);

  const std::size_t nx = model.state_dim();
  const std::size_t nu = model.control_dim();
  const std::size_t n = cfg.particles;
  const std::size_t m = constraints.size();
  const Eigen::MatrixXd noise = control_noise_factor(cfg.control_precision);
  const Eigen::VectorXd first_mean = options.control_mean.value_or(Eigen::VectorXd::Zero(nu));
  if (static_cast<std::size_t>(first_mean.size()) != nu) {
    throw ShapeError("forward_filter: warm-start control has the wrong dimension");
  }
  const double log_uniform = -std::log(static_cast<double>(n));

  ParticleHistory history;
  history.state_dim = nx;
  history.control_dim = nu;
  history.particles = n;
  history.steps.reserve(cfg.horizon + 1);

  std::vector<std::size_t> pending_ancestors;

  for (std::size_t t = 0; t <= cfg.horizon; ++t) {
    ParticleStep step;
    step.states.resize(n * nx);
    step.controls.resize(n * nu);
    step.log_weights.resize(n);
    step.ancestors.resize(n);

    const ParticleStep * prev = t > 0 ? &history.steps.back() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      step.ancestors[i] = (prev != nullptr && prev->resampled) ? pending_ancestors[i] : i;
    }
    const Reference & ref = refs[t];
    const std::span<const double> ref_state(ref.state.data(), nx);
    const std::span<const double> ref_mask(ref.mask.data(), nx);

    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      std::vector<double> g(m);
      Eigen::VectorXd z(static_cast<Eigen::Index>(nu));
      for (std::size_t i = begin; i < end; ++i) {
        double * x = step.states.data() + i * nx;
        double * u = step.controls.data() + i * nu;
        double base = log_uniform;
        if (prev == nullptr) {
          std::copy(current_state.begin(), current_state.end(), x);
        } else {
          const std::size_t a = step.ancestors[i];
          std::copy_n(prev->predicted.data() + a * nx, nx, x);
          base = prev->resampled ? log_uniform : prev->log_weights[a];
        }

        SplitMix64 gen = rng.stream(options.call, t, i);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t j = 0; j < nu; ++j) {
          z[static_cast<Eigen::Index>(j)] = normal(gen);
        }
        Eigen::Map<Eigen::VectorXd> control(u, static_cast<Eigen::Index>(nu));
        control = noise * z;
        if (prev == nullptr) {
          control += first_mean;
        }

        const std::span<const double> xs(x, nx);
        const std::span<const double> us(u, nu);
        constraints.evaluate(xs, us, t, g);
        step.log_weights[i] = base + measurement_loglik(xs, ref_state, ref_mask, g, cfg);
      }
    });

    if (!normalize_log_weights(step.log_weights, step.weights)) {
      throw DegenerateHorizonError(t);
    }
    step.ess = effective_sample_size(step.weights);

    if (t < cfg.horizon) {
      step.predicted.resize(n * nx);
      parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          model.step(
            std::span<const double>(step.states.data() + i * nx, nx),
            std::span<const double>(step.controls.data() + i * nu, nu), cfg.dt,
            std::span<double>(step.predicted.data() + i * nx, nx));
        }
      });
      if (cfg.resample_threshold > 0.0 &&
          step.ess < cfg.resample_threshold * static_cast<double>(n)) {
        SplitMix64 gen = rng.stream(options.call, t, n);
        pending_ancestors = systematic_resample(step.weights, gen);
        step.resampled = true;
      }
    }
    history.steps.push_back(std::move(step));
  }
  return history;
}

}  // namespace capnmpc
