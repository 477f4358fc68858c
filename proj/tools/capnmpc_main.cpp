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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capnmpc/cli.hpp"
#include "capnmpc/errors.hpp"

int main(int argc, char ** argv)
{
  namespace cli = capnmpc::cli;

  CLI::App app{"Particle filter/smoother model predictive control for vehicle motion planning"};
  app.require_subcommand(1);

  auto * run = app.add_subcommand("run", "Run a closed-loop episode from a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "Run config (JSON)")->required();
  run->allow_extras();
  run->footer("Any config field can be overridden with --dotted.key value, e.g. --solver.N 500.");

  auto * oracle = app.add_subcommand("oracle-lq", "Compare against the exact linear-Gaussian posterior");
  cli::OracleOptions oracle_opts;
  oracle->add_option("--N", oracle_opts.particles, "Particle count")->capture_default_str();
  oracle->add_option("--seeds", oracle_opts.seeds, "Number of consecutive seeds")->capture_default_str();
  oracle->add_option("--seed", oracle_opts.first_seed, "First seed")->capture_default_str();
  oracle->add_option("--H", oracle_opts.horizon, "Horizon length")->capture_default_str();
  oracle->add_option("--resample-threshold", oracle_opts.resample_threshold, "ESS fraction; 0 never resamples")
    ->capture_default_str();
  oracle->add_option("--tolerance", oracle_opts.tolerance, "Per-seed error bound")->capture_default_str();

  auto * validate = app.add_subcommand("validate-model", "One-step accuracy of an MLP against the bicycle model");
  std::string weights_path;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double threshold = 0.05;
  validate->add_option("weights", weights_path, "Weights file (JSON)")->required();
  validate->add_option("--samples", samples, "Number of sampled (state, control) pairs")->capture_default_str();
  validate->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  validate->add_option("--threshold", threshold, "Pass bound on the normalized RMSE")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitSuccess : cli::kExitConfigError;
  }

  if (run->parsed()) {
    std::vector<std::pair<std::string, std::string>> overrides;
    try {
      overrides = cli::parse_override_args(run->remaining());
    } catch (const capnmpc::ConfigError & e) {
      std::cerr << "config error: " << e.what() << '\n';
      return cli::kExitConfigError;
    }
    return cli::cmd_run(config_path, overrides, std::cout, std::cerr);
  }
  if (oracle->parsed()) {
    return cli::cmd_oracle_lq(oracle_opts, std::cout, std::cerr);
  }
  return cli::cmd_validate_model(weights_path, samples, seed, threshold, std::cout, std::cerr);
}
