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

#ifndef CAPNMPC__CLI_HPP_
#define CAPNMPC__CLI_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "capnmpc/estimator.hpp"
#include "capnmpc/mlp.hpp"
#include "capnmpc/planner.hpp"

namespace capnmpc::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitFailure = 2;

struct ModelChoice {
  enum class Kind { bicycle, mlp };
  Kind kind = Kind::bicycle;
  std::filesystem::path path;  // mlp only, resolved
};

/// Fully resolved run configuration. Relative paths in the document are
/// resolved against `base_dir` (the config file's directory).
struct RunConfig {
  Scenario scenario;
  SolverConfig solver;
  ModelChoice model;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
};

/// Reads a JSON document; syntax errors become ConfigError with line/column.
nlohmann::json load_config_document(const std::filesystem::path & path);

/// Sets a dotted key (`solver.N`, `scenario.goal.x`) in `doc`. The value is
/// parsed as JSON when possible and kept as a string otherwise. A builtin
/// scenario given by name is promoted to {"builtin": name} first.
void apply_override(nlohmann::json & doc, const std::string & dotted_key, const std::string & value);

/// Splits `--key value` / `--key=value` pairs. Throws ConfigError on a
/// dangling key or a token that is not a `--key`.
std::vector<std::pair<std::string, std::string>> parse_override_args(
  const std::vector<std::string> & args);

/// Throws ConfigError naming the offending dotted field.
RunConfig parse_run_config(const nlohmann::json & doc, const std::filesystem::path & base_dir);

Scenario parse_scenario(const nlohmann::json & node);
SolverConfig parse_solver(const nlohmann::json & node);

nlohmann::json scenario_to_json(const Scenario & scenario);
nlohmann::json solver_to_json(const SolverConfig & solver);
nlohmann::json run_config_to_json(const RunConfig & config);

// Output files. Numbers are written with 17 significant digits.
void write_trajectory_csv(const std::filesystem::path & path, const EpisodeResult & result, double dt);
void write_distances_csv(const std::filesystem::path & path, const EpisodeResult & result, double dt);
nlohmann::json episode_metrics(const EpisodeResult & result);
void write_json(const std::filesystem::path & path, const nlohmann::json & doc);

int cmd_run(
  const std::filesystem::path & config_path,
  const std::vector<std::pair<std::string, std::string>> & overrides, std::ostream & out,
  std::ostream & err);

struct OracleOptions {
  std::size_t particles = 5000;
  std::size_t seeds = 1;
  std::uint64_t first_seed = 0;
  std::size_t horizon = 5;
  double resample_threshold = 0.0;
  double tolerance = 0.05;
};

int cmd_oracle_lq(const OracleOptions & options, std::ostream & out, std::ostream & err);

/// Box the one-step validation samples (state, control) from. Matches the
/// planner's operating envelope; dt comes from the weights file.
struct SamplingBox {
  std::array<double, 4> state_lo{-10.0, -10.0, 0.0, -0.8};
  std::array<double, 4> state_hi{250.0, 10.0, 20.0, 0.8};
  std::array<double, 2> control_lo{-3.0, -0.5};
  std::array<double, 2> control_hi{3.0, 0.5};
};

struct ModelReport {
  std::array<double, 4> rmse{};
  std::array<double, 4> normalized_rmse{};  // rmse / std of the true increment
  double overall = 0.0;                     // root mean square of normalized_rmse
};

/// One-step MLP vs bicycle comparison on increments x' - x.
ModelReport evaluate_model(
  const MlpModel & model, std::size_t samples, std::uint64_t seed, const SamplingBox & box = {},
  double wheelbase = kDefaultWheelbase);

int cmd_validate_model(
  const std::filesystem::path & weights, std::size_t samples, std::uint64_t seed, double threshold,
  std::ostream & out, std::ostream & err);

}  // namespace capnmpc::cli

#endif  // CAPNMPC__CLI_HPP_
