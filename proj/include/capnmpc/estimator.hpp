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

#ifndef CAPNMPC__ESTIMATOR_HPP_
#define CAPNMPC__ESTIMATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "capnmpc/dynamics.hpp"
#include "capnmpc/rng.hpp"

// Constraint-aware particle filtering/smoothing for receding-horizon control.
//
// The horizon problem is posed as estimation on a virtual system: states
// evolve through the dynamics model without noise, controls are i.i.d.
// N(0, Q^-1) draws, the reference is a measurement of the state with
// precision R, and every constraint value g_j is observed through a softplus
// barrier as a zero-valued measurement with noise std eta_std. The filter is
// a bootstrap particle filter; the smoother reweights the filtered particles
// backwards; the control applied is the smoothed posterior mean at the first
// step.

namespace capnmpc {

struct SolverConfig {
  std::size_t horizon = 10;          // H, steps after the current one
  std::size_t particles = 300;       // N
  Eigen::MatrixXd control_precision  // Q (n_u x n_u, SPD)
    = Eigen::Vector2d(0.5, 20.0).asDiagonal();
  Eigen::VectorXd tracking_precision  // diag(R) (n_x)
    = Eigen::Vector4d(1.0, 1.0, 0.5, 0.0);
  double alpha = 1.0;
  double beta = 5.0;
  double eta_std = 0.1;
  double smoother_bandwidth = 1e-2;  // kernel std; variance is its square
  double resample_threshold = 0.5;   // fraction of N; 0 disables resampling
  double dt = 0.2;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field (H, N, Q, R, ...).
  void validate() const;
  void validate_for(const DynamicsModel & model) const;
};

struct AugmentedParticle {
  Eigen::VectorXd state;
  Eigen::VectorXd control;
  double log_weight = 0.0;
};

/// Reference r_t with a per-channel 0/1 mask selecting which channels R penalizes.
struct Reference {
  Eigen::VectorXd state;
  Eigen::VectorXd mask;
};

class ReferenceTrajectory {
public:
  ReferenceTrajectory() = default;
  explicit ReferenceTrajectory(std::vector<Reference> points) : points_(std::move(points)) {}

  static ReferenceTrajectory constant(const Eigen::VectorXd & state, const Eigen::VectorXd & mask,
                                      std::size_t horizon);

  std::size_t size() const { return points_.size(); }
  const Reference & operator[](std::size_t t) const { return points_[t]; }

private:
  std::vector<Reference> points_;
};

/// g(x, u, t) <= 0 convention. size() is constant across calls.
class ConstraintEvaluator {
public:
  virtual ~ConstraintEvaluator() = default;
  virtual std::size_t size() const = 0;
  virtual void evaluate(
    std::span<const double> x, std::span<const double> u, std::size_t t, std::span<double> g) const = 0;
};

class NoConstraints final : public ConstraintEvaluator {
public:
  std::size_t size() const override { return 0; }
  void evaluate(std::span<const double>, std::span<const double>, std::size_t, std::span<double>)
    const override
  {}
};

/// Filtered particle set at one horizon step (row-major N x n_x / N x n_u).
struct ParticleStep {
  std::vector<double> states;
  std::vector<double> controls;
  std::vector<double> log_weights;     // normalized, log domain
  std::vector<double> weights;         // normalized
  std::vector<std::size_t> ancestors;  // parent index at the previous step
  std::vector<double> predicted;       // f(state_i, control_i); empty at the last step
  double ess = 0.0;
  bool resampled = false;              // whether the next step was drawn from a resample
};

struct ParticleHistory {
  std::size_t state_dim = 0;
  std::size_t control_dim = 0;
  std::size_t particles = 0;
  std::vector<ParticleStep> steps;  // H + 1 entries, t = k .. k+H

  AugmentedParticle particle(std::size_t t, std::size_t i) const;
};

struct SmoothedWeights {
  std::vector<std::vector<double>> log_weights;  // per step, normalized
  std::vector<std::vector<double>> weights;
};

// --- scalar pieces ----------------------------------------------------------

/// (1/alpha) * ln(1 + exp(beta * s)), overflow-safe.
double softplus_barrier(double s, double alpha, double beta);

/// Log of p(r, z=0 | x) without additive constants:
/// -1/2 (x-r)' diag(R .* mask) (x-r) - 1/(2 eta^2) * sum_j phi(g_j)^2.
double measurement_loglik(
  std::span<const double> state, std::span<const double> reference, std::span<const double> mask,
  std::span<const double> g, const SolverConfig & cfg);

double measurement_loglik(
  const AugmentedParticle & p, const Eigen::VectorXd & reference, const Eigen::VectorXd & mask,
  std::span<const double> g, const SolverConfig & cfg);

/// Factor S with S S' = Q^-1; u = S z with z ~ N(0, I) samples the control prior.
Eigen::MatrixXd control_noise_factor(const Eigen::MatrixXd & control_precision);

/// Next augmented particle: state through the model (no noise), control ~ N(0, Q^-1).
AugmentedParticle propagate(
  const AugmentedParticle & p, const DynamicsModel & model, const SolverConfig & cfg, SplitMix64 & rng);

double effective_sample_size(std::span<const double> weights);

/// Systematic resampling with offset u in [0, 1). Output is sorted.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u);
std::vector<std::size_t> systematic_resample(std::span<const double> weights, SplitMix64 & rng);

/// log N(to.control; 0, Q^-1) + log N(to.state; f(from), eps I), eps = bandwidth^2.
double transition_logdensity(
  const AugmentedParticle & from, const AugmentedParticle & to, const DynamicsModel & model,
  const SolverConfig & cfg);

// --- horizon solve ----------------------------------------------------------

struct FilterOptions {
  std::uint64_t call = 0;                     // counter-RNG call id
  std::optional<Eigen::VectorXd> control_mean;  // warm start for the first control
};

ParticleHistory forward_filter(
  const DynamicsModel & model, const ConstraintEvaluator & constraints,
  const ReferenceTrajectory & refs, std::span<const double> current_state, const SolverConfig & cfg,
  const CounterRng & rng, const FilterOptions & options = {});

/// Reweighted particle smoother over a complete history.
SmoothedWeights backward_smooth(const ParticleHistory & history, const SolverConfig & cfg);

/// Weighted mean of the particles at one step. log_weight of the result is 0.
AugmentedParticle point_estimate(
  const ParticleHistory & history, std::size_t t, std::span<const double> weights);

/// Log posterior of a dynamics-consistent trajectory, up to a constant:
/// sum_t [-1/2 u'Qu - 1/2 (x-r)'R(x-r) - 1/(2 eta^2) sum_j phi(g_j)^2].
/// states.size() == controls.size() == refs.size(). Throws InvalidTrajectoryError.
double trajectory_logposterior(
  const DynamicsModel & model, std::span<const Eigen::VectorXd> states,
  std::span<const Eigen::VectorXd> controls, const ReferenceTrajectory & refs,
  const ConstraintEvaluator & constraints, const SolverConfig & cfg);

/// Horizon cost sum_t u'Qu + (x-r)'R(x-r) of the unconstrained tracking problem.
double tracking_cost(
  std::span<const Eigen::VectorXd> states, std::span<const Eigen::VectorXd> controls,
  const ReferenceTrajectory & refs, const SolverConfig & cfg);

struct NmpcSolution {
  Eigen::VectorXd control;            // u_k*
  AugmentedParticle estimate;         // smoothed mean at step k
  Eigen::VectorXd next_control_mean;  // smoothed mean control at k+1 (warm start)
  double min_ess = 0.0;
  std::size_t resample_count = 0;
};

NmpcSolution nmpc_step(
  const DynamicsModel & model, const ConstraintEvaluator & constraints,
  const ReferenceTrajectory & refs, std::span<const double> current_state, const SolverConfig & cfg,
  const CounterRng & rng, const FilterOptions & options = {});

/// Receding-horizon controller: threads the RNG call counter and warm start
/// between successive solves.
class CapNmpc {
public:
  explicit CapNmpc(SolverConfig cfg);

  NmpcSolution solve(
    const DynamicsModel & model, const ConstraintEvaluator & constraints,
    const ReferenceTrajectory & refs, std::span<const double> current_state);

  const SolverConfig & config() const { return cfg_; }
  void reset();

private:
  SolverConfig cfg_;
  CounterRng rng_;
  std::optional<Eigen::VectorXd> warm_start_;
};

}  // namespace capnmpc

#endif  // CAPNMPC__ESTIMATOR_HPP_
