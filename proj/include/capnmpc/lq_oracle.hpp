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

#ifndef CAPNMPC__LQ_ORACLE_HPP_
#define CAPNMPC__LQ_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace capnmpc {

/// Scalar integrator x' = x + u tracked to a constant reference, with
/// controls u_k .. u_{k+H} under prior N(0, 1/q) and measurements
/// r = x_t + N(0, 1/r) for t = k .. k+H.
struct LqProblem {
  std::size_t horizon = 5;
  double control_precision = 1.0;
  double tracking_precision = 1.0;
  double reference = 1.0;
  double initial_state = 0.0;
};

/// Exact Gaussian posterior over (u_k .. u_{k+H}) by a dense linear solve.
struct LqPosterior {
  std::vector<double> mean;
  std::vector<double> variance;  // marginal variances
};

LqPosterior lq_posterior(const LqProblem & problem);

struct LqCheck {
  double estimate = 0.0;
  double oracle = 0.0;
  double error = 0.0;
  double min_ess = 0.0;
};

/// Runs one receding-horizon solve of the particle controller on the LQ
/// problem (no constraints) and compares u_k against the exact posterior mean.
LqCheck run_lq_check(
  const LqProblem & problem, std::size_t particles, std::uint64_t seed, double resample_threshold = 0.0);

}  // namespace capnmpc

#endif  // CAPNMPC__LQ_ORACLE_HPP_
