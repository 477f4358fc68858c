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
#include <cstdio>
#include <memory>
#include <ostream>
#include <random>

#include "capnmpc/cli.hpp"
#include "capnmpc/errors.hpp"
#include "capnmpc/lq_oracle.hpp"

namespace capnmpc::cli {
namespace {

using nlohmann::json;

std::string fixed(double x, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

// Failure record written when the run never produced an episode.
void write_error_metrics(
  const std::filesystem::path & dir, const json & echo, const json & seed, const std::string & error)
{
  json doc{
    {"success", false},
    {"collision", false},
    {"steps_to_goal", nullptr},
    {"min_distance_overall", nullptr},
    {"config_echo", echo},
    {"seed", seed},
    {"failure", error},
  };
  write_json(dir / "metrics.json", doc);
}

std::unique_ptr<DynamicsModel> make_controller_model(const RunConfig & cfg)
{
  if (cfg.model.kind == ModelChoice::Kind::bicycle) {
    return std::make_unique<BicycleModel>(cfg.scenario.wheelbase);
  }
  MlpModel model;
  try {
    model = load_model(cfg.model.path);
  } catch (const LoadError & e) {
    throw ConfigError("model.path", e.what());
  }
  if (model.state_dim != kVehicleStateDim || model.control_dim != kVehicleControlDim) {
    throw ConfigError("model.path", "weights are not a (4-state, 2-control) vehicle model");
  }
  if (std::abs(model.dt - cfg.scenario.dt) > 1e-12) {
    throw ConfigError(
      "model.path", "weights were fit at dt = " + std::to_string(model.dt) + " but the scenario uses dt = " +
                      std::to_string(cfg.scenario.dt));
  }
  return std::make_unique<MlpDynamics>(std::make_shared<const MlpModel>(std::move(model)));
}

}  // namespace

int cmd_run(
  const std::filesystem::path & config_path,
  const std::vector<std::pair<std::string, std::string>> & overrides, std::ostream & out, std::ostream & err)
{
  json doc;
  try {
    doc = load_config_document(config_path);
    for (const auto & [key, value] : overrides) {
      apply_override(doc, key, value);
    }
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const std::filesystem::path base_dir = config_path.parent_path();
  // Where to leave metrics.json if the config itself is rejected.
  std::filesystem::path fallback_dir;
  if (doc.is_object() && doc.contains("output_dir") && doc.at("output_dir").is_string()) {
    fallback_dir = std::filesystem::path(doc.at("output_dir").get<std::string>());
    if (fallback_dir.is_relative()) {
      fallback_dir = base_dir / fallback_dir;
    }
  }
  const json raw_seed = doc.is_object() && doc.contains("seed") ? doc.at("seed") : json(nullptr);

  RunConfig cfg;
  std::unique_ptr<DynamicsModel> model;
  try {
    cfg = parse_run_config(doc, base_dir);
    model = make_controller_model(cfg);
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    if (!fallback_dir.empty()) {
      try {
        write_error_metrics(fallback_dir, doc, raw_seed, std::string("config error: ") + e.what());
      } catch (const std::exception &) {
      }
    }
    return kExitConfigError;
  }

  const json echo = run_config_to_json(cfg);
  EpisodeResult result;
  try {
    result = run_episode(cfg.scenario, *model, cfg.solver);
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    write_error_metrics(cfg.output_dir, echo, cfg.seed, std::string("config error: ") + e.what());
    return kExitConfigError;
  } catch (const std::exception & e) {
    err << "planning failure: " << e.what() << '\n';
    write_error_metrics(cfg.output_dir, echo, cfg.seed, e.what());
    return kExitFailure;
  }

  write_trajectory_csv(cfg.output_dir / "trajectory.csv", result, cfg.scenario.dt);
  write_distances_csv(cfg.output_dir / "distances.csv", result, cfg.scenario.dt);
  json metrics = episode_metrics(result);
  metrics["config_echo"] = echo;
  metrics["seed"] = cfg.seed;
  write_json(cfg.output_dir / "metrics.json", metrics);

  out << cfg.scenario.name << ": " << (result.success ? "success" : "no success") << " after "
      << result.controls.size() << " steps";
  if (result.collision) {
    out << ", collision";
  }
  if (std::isfinite(result.min_distance_overall)) {
    out << ", min obstacle distance " << fixed(result.min_distance_overall, 3) << " m";
  }
  if (!result.failure.empty()) {
    out << ", estimator failure: " << result.failure;
  }
  out << "\noutputs in " << cfg.output_dir.string() << '\n';
  return result.success ? kExitSuccess : kExitFailure;
}

int cmd_oracle_lq(const OracleOptions & options, std::ostream & out, std::ostream & err)
{
  if (options.particles == 0) {
    err << "config error: N: particle count must be at least 1\n";
    return kExitConfigError;
  }
  if (options.seeds == 0) {
    err << "config error: seeds: must be at least 1\n";
    return kExitConfigError;
  }
  if (options.horizon == 0) {
    err << "config error: H: horizon must be at least 1\n";
    return kExitConfigError;
  }
  LqProblem problem;
  problem.horizon = options.horizon;
  double total = 0.0;
  bool all_pass = true;
  for (std::size_t i = 0; i < options.seeds; ++i) {
    const std::uint64_t seed = options.first_seed + i;
    const LqCheck check = run_lq_check(problem, options.particles, seed, options.resample_threshold);
    const bool pass = check.error < options.tolerance;
    all_pass = all_pass && pass;
    total += check.error;
    out << "seed " << seed << "  estimate " << fixed(check.estimate, 6) << "  oracle " << fixed(check.oracle, 6)
        << "  error " << fixed(check.error, 6) << (pass ? "" : "  (above tolerance)") << '\n';
  }
  out << "mean error " << fixed(total / static_cast<double>(options.seeds), 6) << " over " << options.seeds
      << " seed(s), tolerance " << options.tolerance << '\n';
  return all_pass ? kExitSuccess : kExitFailure;
}

ModelReport evaluate_model(
  const MlpModel & model, std::size_t samples, std::uint64_t seed, const SamplingBox & box, double wheelbase)
{
  if (samples == 0) {
    throw ConfigError("samples", "must be at least 1");
  }
  std::mt19937_64 gen(seed);
  auto draw = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); };

  std::array<double, 4> sq_err{};
  std::array<double, 4> sum{};
  std::array<double, 4> sum_sq{};
  for (std::size_t n = 0; n < samples; ++n) {
    const VehicleState s{
      draw(box.state_lo[0], box.state_hi[0]), draw(box.state_lo[1], box.state_hi[1]),
      draw(box.state_lo[2], box.state_hi[2]), draw(box.state_lo[3], box.state_hi[3])};
    const ControlInput u{draw(box.control_lo[0], box.control_hi[0]), draw(box.control_lo[1], box.control_hi[1])};
    const auto truth = bicycle_step(s, u, model.dt, wheelbase).to_array();
    const auto pred = nn_step(model, s, u, model.dt).to_array();
    const auto x = s.to_array();
    for (std::size_t c = 0; c < 4; ++c) {
      const double inc = truth[c] - x[c];
      const double e = pred[c] - truth[c];
      sq_err[c] += e * e;
      sum[c] += inc;
      sum_sq[c] += inc * inc;
    }
  }
  ModelReport report;
  const double m = static_cast<double>(samples);
  double acc = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    report.rmse[c] = std::sqrt(sq_err[c] / m);
    const double mean = sum[c] / m;
    const double spread = std::sqrt(std::max(0.0, sum_sq[c] / m - mean * mean));
    report.normalized_rmse[c] = report.rmse[c] / std::max(spread, kStdFloor);
    acc += report.normalized_rmse[c] * report.normalized_rmse[c];
  }
  report.overall = std::sqrt(acc / 4.0);
  return report;
}

int cmd_validate_model(
  const std::filesystem::path & weights, std::size_t samples, std::uint64_t seed, double threshold,
  std::ostream & out, std::ostream & err)
{
  ModelReport report;
  try {
    if (samples == 0) {
      throw ConfigError("samples", "must be at least 1");
    }
    const MlpModel model = load_model(weights);
    if (model.state_dim != kVehicleStateDim || model.control_dim != kVehicleControlDim) {
      throw ConfigError("weights", "not a (4-state, 2-control) vehicle model");
    }
    report = evaluate_model(model, samples, seed);
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const LoadError & e) {
    err << "load error: " << e.what() << '\n';
    return kExitConfigError;
  }
  static constexpr const char * kChannels[] = {"px", "py", "v", "psi"};
  out << "channel  rmse          normalized\n";
  for (std::size_t c = 0; c < 4; ++c) {
    char line[96];
    std::snprintf(line, sizeof(line), "%-7s  %.6e  %.6e\n", kChannels[c], report.rmse[c], report.normalized_rmse[c]);
    out << line;
  }
  const bool pass = report.overall <= threshold;
  out << "normalized rmse " << fixed(report.overall, 6) << (pass ? " <= " : " > ") << threshold << " over "
      << samples << " samples\n";
  return pass ? kExitSuccess : kExitFailure;
}

}  // namespace capnmpc::cli
