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
#include <fstream>
#include <sstream>
#include <string>

#include "capnmpc/errors.hpp"
#include "capnmpc/mlp.hpp"

namespace capnmpc {
namespace {

using json = nlohmann::json;

[[noreturn]] void invariant(const std::string & field, const std::string & what)
{
  throw LoadError(LoadError::Kind::invariant, field, field + ": " + what);
}

void check_finite(const std::vector<double> & values, const std::string & field)
{
  for (double v : values) {
    if (!std::isfinite(v)) {
      invariant(field, "contains a non-finite value");
    }
  }
}

void check_norm(const Normalization & norm, std::size_t dim, const std::string & field)
{
  if (norm.mean.size() != dim) {
    invariant(field + ".mean", "expected length " + std::to_string(dim));
  }
  if (norm.std.size() != dim) {
    invariant(field + ".std", "expected length " + std::to_string(dim));
  }
  check_finite(norm.mean, field + ".mean");
  check_finite(norm.std, field + ".std");
  for (double s : norm.std) {
    if (!(s >= kStdFloor)) {
      invariant(field + ".std", "entries must be >= std_floor (1e-6)");
    }
  }
}

const json & require(const json & obj, const std::string & key, const std::string & path)
{
  if (!obj.is_object() || !obj.contains(key)) {
    const std::string field = path.empty() ? key : path + "." + key;
    throw LoadError(LoadError::Kind::parse, field, "missing key '" + field + "'");
  }
  return obj.at(key);
}

template <typename T>
T get_as(const json & value, const std::string & field)
{
  try {
    return value.get<T>();
  } catch (const json::exception & e) {
    throw LoadError(LoadError::Kind::parse, field, field + ": " + e.what());
  }
}

Normalization norm_from_json(const json & obj, const std::string & field)
{
  Normalization norm;
  norm.mean = get_as<std::vector<double>>(require(obj, "mean", field), field + ".mean");
  norm.std = get_as<std::vector<double>>(require(obj, "std", field), field + ".std");
  return norm;
}

json norm_to_json(const Normalization & norm)
{
  return json{{"mean", norm.mean}, {"std", norm.std}};
}

}  // namespace

void MlpModel::validate() const
{
  if (state_dim == 0) {
    invariant("state_dim", "must be positive");
  }
  if (control_dim == 0) {
    invariant("control_dim", "must be positive");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    invariant("dt", "must be positive and finite");
  }
  check_norm(input_norm, state_dim + control_dim, "input_norm");
  check_norm(output_norm, state_dim, "output_norm");
  if (layers.empty()) {
    invariant("layers", "at least one layer is required");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const MlpLayer & layer = layers[l];
    const std::string field = "layers[" + std::to_string(l) + "]";
    if (layer.rows == 0 || layer.cols == 0) {
      invariant(field, "rows and cols must be positive");
    }
    if (layer.weights.size() != layer.rows * layer.cols) {
      invariant(
        field + ".weights", "length " + std::to_string(layer.weights.size()) + " != rows*cols " +
                              std::to_string(layer.rows * layer.cols));
    }
    if (layer.bias.size() != layer.rows) {
      invariant(field + ".bias", "length must equal rows");
    }
    check_finite(layer.weights, field + ".weights");
    check_finite(layer.bias, field + ".bias");
    if (l > 0 && layers[l - 1].rows != layer.cols) {
      invariant(field + ".cols", "does not chain with the previous layer's rows");
    }
  }
  if (layers.front().cols != state_dim + control_dim) {
    invariant("layers[0].cols", "must equal state_dim + control_dim");
  }
  if (layers.back().rows != state_dim) {
    invariant("layers[" + std::to_string(layers.size() - 1) + "].rows", "must equal state_dim");
  }
}

MlpModel model_from_json(const json & doc)
{
  if (!doc.is_object()) {
    throw LoadError(LoadError::Kind::parse, "", "weights document must be a JSON object");
  }
  MlpModel model;
  model.state_dim = get_as<std::size_t>(require(doc, "state_dim", ""), "state_dim");
  model.control_dim = get_as<std::size_t>(require(doc, "control_dim", ""), "control_dim");
  model.dt = get_as<double>(require(doc, "dt", ""), "dt");
  const auto activation = get_as<std::string>(require(doc, "activation", ""), "activation");
  if (activation != "relu") {
    invariant("activation", "unsupported activation '" + activation + "'");
  }
  model.activation = Activation::relu;
  model.input_norm = norm_from_json(require(doc, "input_norm", ""), "input_norm");
  model.output_norm = norm_from_json(require(doc, "output_norm", ""), "output_norm");

  const json & layers = require(doc, "layers", "");
  if (!layers.is_array()) {
    throw LoadError(LoadError::Kind::parse, "layers", "layers: expected an array");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string field = "layers[" + std::to_string(l) + "]";
    const json & obj = layers[l];
    MlpLayer layer;
    layer.rows = get_as<std::size_t>(require(obj, "rows", field), field + ".rows");
    layer.cols = get_as<std::size_t>(require(obj, "cols", field), field + ".cols");
    layer.weights = get_as<std::vector<double>>(require(obj, "weights", field), field + ".weights");
    layer.bias = get_as<std::vector<double>>(require(obj, "bias", field), field + ".bias");
    model.layers.push_back(std::move(layer));
  }
  model.validate();
  return model;
}

json model_to_json(const MlpModel & model)
{
  json layers = json::array();
  for (const MlpLayer & layer : model.layers) {
    layers.push_back(
      {{"rows", layer.rows}, {"cols", layer.cols}, {"weights", layer.weights}, {"bias", layer.bias}});
  }
  return json{
    {"state_dim", model.state_dim},
    {"control_dim", model.control_dim},
    {"dt", model.dt},
    {"activation", "relu"},
    {"input_norm", norm_to_json(model.input_norm)},
    {"output_norm", norm_to_json(model.output_norm)},
    {"layers", std::move(layers)},
  };
}

MlpModel load_model(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw LoadError(LoadError::Kind::missing_file, "", "cannot open weights file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw LoadError(LoadError::Kind::parse, "", path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

void save_model(const MlpModel & model, const std::filesystem::path & path)
{
  model.validate();
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write weights file " + path.string());
  }
  out << model_to_json(model).dump(1) << '\n';
}

}  // namespace capnmpc
