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
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "capnmpc/dynamics.hpp"
#include "capnmpc/errors.hpp"
#include "capnmpc/mlp.hpp"

namespace capnmpc {
namespace {

const std::filesystem::path kFixtures{CAPNMPC_FIXTURE_DIR};

MlpLayer layer(std::size_t rows, std::size_t cols, std::vector<double> w, std::vector<double> b)
{
  return MlpLayer{rows, cols, std::move(w), std::move(b)};
}

MlpModel identity_norm_model(std::vector<MlpLayer> layers, std::size_t state_dim, std::size_t control_dim)
{
  MlpModel m;
  m.state_dim = state_dim;
  m.control_dim = control_dim;
  m.input_norm = {std::vector<double>(state_dim + control_dim, 0.0), std::vector<double>(state_dim + control_dim, 1.0)};
  m.output_norm = {std::vector<double>(state_dim, 0.0), std::vector<double>(state_dim, 1.0)};
  m.layers = std::move(layers);
  return m;
}

// Continuous-time bicycle right-hand side for the fine-grid reference.
std::array<double, 4> bicycle_rhs(const std::array<double, 4> & x, const ControlInput & u, double wb)
{
  return {x[2] * std::cos(x[3]), x[2] * std::sin(x[3]), u.a, x[2] / wb * std::tan(u.delta)};
}

std::array<double, 4> rk4_reference(const VehicleState & s, const ControlInput & u, double horizon, double wb)
{
  const int substeps = 2000;
  const double h = horizon / substeps;
  std::array<double, 4> x = s.to_array();
  auto axpy = [](const std::array<double, 4> & a, double c, const std::array<double, 4> & b) {
    return std::array<double, 4>{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]};
  };
  for (int i = 0; i < substeps; ++i) {
    const auto k1 = bicycle_rhs(x, u, wb);
    const auto k2 = bicycle_rhs(axpy(x, h / 2, k1), u, wb);
    const auto k3 = bicycle_rhs(axpy(x, h / 2, k2), u, wb);
    const auto k4 = bicycle_rhs(axpy(x, h, k3), u, wb);
    for (int c = 0; c < 4; ++c) {
      x[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
  }
  return x;
}

TEST(BicycleStep, StraightLineConstantSpeed)
{
  const VehicleState next = bicycle_step({0, 0, 5, 0}, {0, 0}, 0.2, 4.0);
  EXPECT_DOUBLE_EQ(next.px, 1.0);
  EXPECT_DOUBLE_EQ(next.py, 0.0);
  EXPECT_DOUBLE_EQ(next.v, 5.0);
  EXPECT_DOUBLE_EQ(next.psi, 0.0);
}

TEST(BicycleStep, PositionUsesOldSpeed)
{
  const VehicleState next = bicycle_step({0, 0, 5, 0}, {1, 0}, 0.2, 4.0);
  EXPECT_DOUBLE_EQ(next.px, 1.0);
  EXPECT_DOUBLE_EQ(next.v, 5.2);
}

TEST(BicycleStep, SteeringTurnsHeading)
{
  const VehicleState next = bicycle_step({0, 0, 5, 0}, {0, 0.1}, 0.2, 4.0);
  EXPECT_NEAR(next.psi, 0.2 * (5.0 / 4.0) * std::tan(0.1), 1e-15);
  EXPECT_NEAR(next.psi, 0.0250836, 1e-7);
}

TEST(BicycleStep, RejectsBadInput)
{
  EXPECT_THROW(bicycle_step({NAN, 0, 5, 0}, {0, 0}, 0.2, 4.0), InvalidInputError);
  EXPECT_THROW(bicycle_step({0, 0, 5, 0}, {INFINITY, 0}, 0.2, 4.0), InvalidInputError);
  EXPECT_THROW(bicycle_step({0, 0, 5, 0}, {0, M_PI / 2}, 0.2, 4.0), InvalidInputError);
  EXPECT_THROW(bicycle_step({0, 0, 5, 0}, {0, -2.0}, 0.2, 4.0), InvalidInputError);
  EXPECT_THROW(bicycle_step({0, 0, 5, 0}, {0, 0}, 0.0, 4.0), InvalidInputError);
  EXPECT_THROW(bicycle_step({0, 0, 5, 0}, {0, 0}, 0.2, -1.0), InvalidInputError);
}

TEST(BicycleStep, LocalErrorShrinksAtSecondOrderSoGlobalIsFirst)
{
  const VehicleState s{1.0, -2.0, 6.0, 0.3};
  const ControlInput u{0.8, 0.15};
  std::vector<double> errors;
  for (double dt : {0.2, 0.02, 0.002}) {
    const auto ref = rk4_reference(s, u, dt, 4.0);
    const auto got = bicycle_step(s, u, dt, 4.0).to_array();
    double e = 0.0;
    for (int c = 0; c < 4; ++c) {
      e = std::max(e, std::abs(got[c] - ref[c]));
    }
    errors.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log10(errors[i] / errors[i + 1]);
    EXPECT_GE(order, 1.5) << "dt index " << i;
    EXPECT_LE(order, 2.5) << "dt index " << i;
  }
}

TEST(BicycleModel, SaturatesSteeringBeforeStepping)
{
  const BicycleModel model(4.0, 0.5);
  const std::array<double, 4> x{0, 0, 5, 0};
  const std::array<double, 2> u{0.0, 3.0};
  std::array<double, 4> next{};
  model.step(x, u, 0.2, next);
  EXPECT_DOUBLE_EQ(next[3], bicycle_step({0, 0, 5, 0}, {0, 0.5}, 0.2, 4.0).psi);
  EXPECT_THROW(BicycleModel(0.0), InvalidInputError);
  EXPECT_THROW(BicycleModel(4.0, 2.0), InvalidInputError);
}

TEST(MlpForward, IdentityLayerPassesNonNegativeInput)
{
  const MlpModel m = identity_norm_model({layer(2, 2, {1, 0, 0, 1}, {0, 0})}, 1, 1);
  const std::vector<double> in{1.0, 2.0};
  EXPECT_EQ(mlp_forward(m, in), (std::vector<double>{1.0, 2.0}));
}

TEST(MlpForward, HiddenReluClipsNegatives)
{
  const MlpModel m =
    identity_norm_model({layer(2, 2, {1, 0, 0, 1}, {0, 0}), layer(2, 2, {1, 0, 0, 1}, {0, 0})}, 1, 1);
  const std::vector<double> in{-1.0, -2.0};
  EXPECT_EQ(mlp_forward(m, in), (std::vector<double>{0.0, 0.0}));
}

TEST(MlpForward, TwoLayerHandArithmetic)
{
  const MlpModel m = identity_norm_model({layer(2, 2, {1, 1, 1, -1}, {0, 0}), layer(1, 2, {1, 1}, {0})}, 1, 1);
  const std::vector<double> in{2.0, 1.0};
  EXPECT_EQ(mlp_forward(m, in), (std::vector<double>{4.0}));
}

TEST(MlpForward, ShapeMismatchThrows)
{
  const MlpModel m = identity_norm_model({layer(2, 2, {1, 0, 0, 1}, {0, 0})}, 1, 1);
  const std::vector<double> in{1.0, 2.0, 3.0};
  EXPECT_THROW(mlp_forward(m, in), ShapeError);
  MlpModel empty = m;
  empty.layers.clear();
  EXPECT_THROW(mlp_forward(empty, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST(MlpForward, PositivelyHomogeneousWithoutBias)
{
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n01;
  auto rand_layer = [&](std::size_t rows, std::size_t cols) {
    std::vector<double> w(rows * cols);
    for (double & x : w) {
      x = n01(gen);
    }
    return layer(rows, cols, std::move(w), std::vector<double>(rows, 0.0));
  };
  const MlpModel m = identity_norm_model({rand_layer(16, 6), rand_layer(16, 16), rand_layer(4, 16)}, 4, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(6);
    for (double & v : x) {
      v = n01(gen);
    }
    const auto base = mlp_forward(m, x);
    for (double c : {0.5, 2.0}) {
      std::vector<double> cx(x);
      for (double & v : cx) {
        v *= c;
      }
      const auto scaled = mlp_forward(m, cx);
      for (std::size_t i = 0; i < base.size(); ++i) {
        EXPECT_NEAR(scaled[i], c * base[i], 1e-12 * (1.0 + std::abs(base[i])));
      }
    }
  }
}

TEST(NnStep, ZeroIncrementNetworkIsIdentity)
{
  // Zero weights and bias, output mean zero: the rate is exactly zero.
  MlpModel m = identity_norm_model(
    {layer(8, 6, std::vector<double>(48, 0.0), std::vector<double>(8, 0.0)),
     layer(4, 8, std::vector<double>(32, 0.0), std::vector<double>(4, 0.0))},
    4, 2);
  m.output_norm.std = {3.0, 2.0, 0.5, 7.0};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const VehicleState s{d(gen), d(gen), d(gen), d(gen)};
    const ControlInput u{d(gen), d(gen)};
    const double dt = 0.001 + std::abs(d(gen)) / 10.0;
    EXPECT_EQ(nn_step(m, s, u, dt), s);
  }
}

TEST(NnStep, DenormalizedRateIsScaledByDt)
{
  // Output layer emits (1, 0, 0, 0) regardless of input.
  const MlpModel m = identity_norm_model(
    {layer(4, 6, std::vector<double>(24, 0.0), {1, 0, 0, 0})}, 4, 2);
  const VehicleState next = nn_step(m, {3, 4, 5, 6}, {0, 0}, 0.2);
  EXPECT_DOUBLE_EQ(next.px, 3.2);
  EXPECT_DOUBLE_EQ(next.py, 4.0);
  EXPECT_THROW(nn_step(m, {3, 4, 5, 6}, {0, 0}, 0.0), InvalidInputError);
}

TEST(ModelIo, TinyFixtureMatchesHandComputation)
{
  const MlpModel m = load_model(kFixtures / "tiny_mlp.json");
  ASSERT_EQ(m.layers.size(), 2u);
  EXPECT_EQ(m.layers[0].rows, 3u);
  EXPECT_EQ(m.layers[0].cols, 6u);
  EXPECT_EQ(m.layers[1].rows, 4u);
  EXPECT_DOUBLE_EQ(m.dt, 0.2);

  // normalized input (0.2, -0.3, 0.4, 0.2, 1/3, 0.4)
  // hidden relu(1.4, 0.65, -1/6) = (1.4, 0.65, 0)
  // output (0.4, 0.8, 0, 0.6) -> rate (7, 0.8, 0, 0.15)
  const VehicleState next = nn_step(m, {2.0, -3.0, 7.0, 0.1}, {1.0, 0.2}, 0.2);
  EXPECT_NEAR(next.px, 3.4, 1e-12);
  EXPECT_NEAR(next.py, -2.84, 1e-12);
  EXPECT_NEAR(next.v, 7.0, 1e-12);
  EXPECT_NEAR(next.psi, 0.13, 1e-12);
}

TEST(ModelIo, SaveLoadRoundTripIsBitExact)
{
  const MlpModel m = load_model(kFixtures / "bicycle_mlp.json");
  const auto path = std::filesystem::temp_directory_path() / "capnmpc_roundtrip_mlp.json";
  save_model(m, path);
  const MlpModel back = load_model(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.layers.size(), m.layers.size());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    EXPECT_EQ(back.layers[l].weights, m.layers[l].weights);
    EXPECT_EQ(back.layers[l].bias, m.layers[l].bias);
  }
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const VehicleState s{100 * d(gen), 5 * d(gen), 10 + 5 * d(gen), 0.5 * d(gen)};
    const ControlInput u{2 * d(gen), 0.4 * d(gen)};
    EXPECT_EQ(nn_step(m, s, u, m.dt), nn_step(back, s, u, back.dt));
  }
}

TEST(ModelIo, MatchesExporterForwardPassOnSharedVectors)
{
  const MlpModel m = load_model(kFixtures / "bicycle_mlp.json");
  std::ifstream in(kFixtures / "bicycle_mlp_vectors.json");
  ASSERT_TRUE(in);
  const auto doc = nlohmann::json::parse(in);
  const auto inputs = doc.at("inputs").get<std::vector<std::vector<double>>>();
  const auto outputs = doc.at("outputs").get<std::vector<std::vector<double>>>();
  ASSERT_EQ(inputs.size(), 100u);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto got = mlp_forward(m, inputs[i]);
    ASSERT_EQ(got.size(), outputs[i].size());
    for (std::size_t c = 0; c < got.size(); ++c) {
      EXPECT_NEAR(got[c], outputs[i][c], 1e-9) << "vector " << i << " channel " << c;
    }
  }
}

class ModelIoErrors : public ::testing::Test {
protected:
  void SetUp() override
  {
    std::ifstream in(kFixtures / "tiny_mlp.json");
    doc_ = nlohmann::json::parse(in);
  }

  LoadError load_error(const nlohmann::json & doc)
  {
    const auto path = std::filesystem::temp_directory_path() / "capnmpc_bad_mlp.json";
    {
      std::ofstream out(path);
      out << doc.dump();
    }
    try {
      load_model(path);
    } catch (const LoadError & e) {
      std::filesystem::remove(path);
      return e;
    }
    std::filesystem::remove(path);
    ADD_FAILURE() << "expected a LoadError";
    return LoadError(LoadError::Kind::parse, "", "");
  }

  nlohmann::json doc_;
};

TEST_F(ModelIoErrors, MissingFile)
{
  try {
    load_model(kFixtures / "does_not_exist.json");
    FAIL();
  } catch (const LoadError & e) {
    EXPECT_EQ(e.kind(), LoadError::Kind::missing_file);
  }
}

TEST_F(ModelIoErrors, SyntaxError)
{
  const auto path = std::filesystem::temp_directory_path() / "capnmpc_syntax_mlp.json";
  {
    std::ofstream out(path);
    out << "{\"state_dim\": 4,";
  }
  try {
    load_model(path);
    ADD_FAILURE();
  } catch (const LoadError & e) {
    EXPECT_EQ(e.kind(), LoadError::Kind::parse);
  }
  std::filesystem::remove(path);
}

TEST_F(ModelIoErrors, MissingKeyNamesField)
{
  doc_["output_norm"].erase("std");
  const LoadError e = load_error(doc_);
  EXPECT_EQ(e.kind(), LoadError::Kind::parse);
  EXPECT_EQ(e.field(), "output_norm.std");
}

TEST_F(ModelIoErrors, WeightsLengthMismatchIsInvariantViolation)
{
  doc_["layers"][1]["weights"].erase(0);
  const LoadError e = load_error(doc_);
  EXPECT_EQ(e.kind(), LoadError::Kind::invariant);
  EXPECT_EQ(e.field(), "layers[1].weights");
}

TEST_F(ModelIoErrors, StdBelowFloorRejected)
{
  doc_["input_norm"]["std"][3] = 1e-9;
  const LoadError e = load_error(doc_);
  EXPECT_EQ(e.kind(), LoadError::Kind::invariant);
  EXPECT_EQ(e.field(), "input_norm.std");
}

TEST_F(ModelIoErrors, LayersMustChain)
{
  doc_["layers"][1]["cols"] = 2;
  doc_["layers"][1]["weights"] = std::vector<double>(8, 0.0);
  const LoadError e = load_error(doc_);
  EXPECT_EQ(e.kind(), LoadError::Kind::invariant);
  EXPECT_EQ(e.field(), "layers[1].cols");
}

TEST_F(ModelIoErrors, UnknownActivationRejected)
{
  doc_["activation"] = "tanh";
  const LoadError e = load_error(doc_);
  EXPECT_EQ(e.field(), "activation");
}

}  // namespace
}  // namespace capnmpc
