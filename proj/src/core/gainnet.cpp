/*
 * Copyright 2026 The softsensor Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "core/gainnet.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <random>

#include "core/error.hpp"

namespace softsensor {

namespace {

constexpr const char* kCheckpointFormat = "softsensor.gain_network";
constexpr int kCheckpointVersion = 1;

}  // namespace

std::size_t GainNetworkParams::input_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.cols());
}

std::size_t GainNetworkParams::output_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weights.rows());
}

std::vector<int> GainNetworkParams::dims() const {
  std::vector<int> out;
  if (layers.empty()) return out;
  out.push_back(static_cast<int>(layers.front().weights.cols()));
  for (const auto& layer : layers) out.push_back(static_cast<int>(layer.weights.rows()));
  return out;
}

std::size_t GainNetworkParams::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) {
    count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return count;
}

void GainNetworkParams::validate() const {
  if (layers.empty()) fail(ErrorCode::kInvalidArgument, "network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.bias.size() != layer.weights.rows()) {
      fail(ErrorCode::kDimensionMismatch,
           "layer " + std::to_string(i) + " bias does not match weights");
    }
    if (i > 0 && layer.weights.cols() != layers[i - 1].weights.rows()) {
      fail(ErrorCode::kDimensionMismatch,
           "layer " + std::to_string(i) + " does not chain with its predecessor");
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      fail(ErrorCode::kInvalidArgument, "non-finite network parameter");
    }
  }
  if (n < 1 || m < 1 || output_dim() != static_cast<std::size_t>(n * m)) {
    fail(ErrorCode::kDimensionMismatch, "network output must have n*m entries");
  }
}

GainNetworkParams xavier_init(const std::vector<int>& dims, int n, int m,
                              std::uint64_t seed) {
  if (dims.size() < 2) fail(ErrorCode::kInvalidArgument, "need at least two layer sizes");
  for (int d : dims) {
    if (d <= 0) fail(ErrorCode::kInvalidArgument, "layer sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  GainNetworkParams params;
  params.n = n;
  params.m = m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    DenseLayer layer{Matrix(fan_out, fan_in), Vector::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = uniform(rng);
    }
    params.layers.push_back(std::move(layer));
  }
  params.validate();
  return params;
}

Matrix forward_batch(const GainNetworkParams& params, const Matrix& inputs,
                     ForwardCache* cache) {
  if (static_cast<std::size_t>(inputs.rows()) != params.input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "network input has wrong size");
  }
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(inputs);
  }
  Matrix current = inputs;
  const std::size_t last = params.layers.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const auto& layer = params.layers[i];
    Matrix pre = layer.weights * current;
    pre.colwise() += layer.bias;
    if (i == last) return pre;
    current = pre.array().tanh().matrix();
    if (cache) cache->activations.push_back(current);
  }
  return current;
}

LayerTensors backward_batch(const GainNetworkParams& params,
                            const ForwardCache& cache, const Matrix& d_outputs,
                            Matrix* d_inputs) {
  if (cache.activations.size() != params.layers.size()) {
    fail(ErrorCode::kDimensionMismatch, "forward cache does not match parameters");
  }
  if (static_cast<std::size_t>(d_outputs.rows()) != params.output_dim() ||
      d_outputs.cols() != cache.activations.front().cols()) {
    fail(ErrorCode::kDimensionMismatch, "output gradient has wrong shape");
  }
  LayerTensors grads(params.layers.size());
  Matrix delta = d_outputs;
  for (std::size_t i = params.layers.size(); i-- > 0;) {
    const Matrix& input = cache.activations[i];
    grads[i].weights = delta * input.transpose();
    grads[i].bias = delta.rowwise().sum();
    if (i == 0 && d_inputs == nullptr) break;
    Matrix d_input = params.layers[i].weights.transpose() * delta;
    if (i == 0) {
      *d_inputs = std::move(d_input);
      break;
    }
    // input is tanh(pre) of the previous layer
    delta = d_input.array() * (1.0 - input.array().square());
  }
  return grads;
}

ForwardResult forward(const GainNetworkParams& params, const Vector& z) {
  ForwardResult result;
  const Matrix out = forward_batch(params, z, &result.cache);
  result.gain = reshape_gain(out.col(0), params.n, params.m);
  return result;
}

BackwardResult backward(const GainNetworkParams& params, const ForwardCache& cache,
                        const Matrix& d_gain) {
  if (d_gain.rows() != params.n || d_gain.cols() != params.m) {
    fail(ErrorCode::kDimensionMismatch, "gain gradient must be n x m");
  }
  BackwardResult result;
  Matrix d_input;
  result.d_params = backward_batch(params, cache, flatten_gain(d_gain), &d_input);
  result.d_input = d_input.col(0);
  return result;
}

Matrix reshape_gain(const Eigen::Ref<const Vector>& flat, int n, int m) {
  if (flat.size() != n * m) fail(ErrorCode::kDimensionMismatch, "flat gain size");
  Matrix gain(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) gain(i, j) = flat[i * m + j];
  }
  return gain;
}

Vector flatten_gain(const Matrix& gain) {
  Vector flat(gain.size());
  for (Eigen::Index i = 0; i < gain.rows(); ++i) {
    for (Eigen::Index j = 0; j < gain.cols(); ++j) flat[i * gain.cols() + j] = gain(i, j);
  }
  return flat;
}

Vector assemble_input(double t, const Vector& u, const Vector& y,
                      const InputScaling& scaling) {
  Vector z(1 + u.size() + y.size());
  z[0] = t / scaling.time_scale;
  z.segment(1, u.size()) = u;
  z.tail(y.size()) = y;
  return z;
}

GainProvider make_gain_provider(GainNetworkParams params, InputScaling scaling) {
  params.validate();
  auto shared = std::make_shared<const GainNetworkParams>(std::move(params));
  return [shared, scaling](double t, const Vector& u, const Vector& y) -> Matrix {
    const Vector z = assemble_input(t, u, y, scaling);
    const Matrix out = forward_batch(*shared, z, nullptr);
    return reshape_gain(out.col(0), shared->n, shared->m);
  };
}

LayerTensors zeros_like(const LayerTensors& layers) {
  LayerTensors out;
  out.reserve(layers.size());
  for (const auto& layer : layers) {
    out.push_back({Matrix::Zero(layer.weights.rows(), layer.weights.cols()),
                   Vector::Zero(layer.bias.size())});
  }
  return out;
}

Vector flatten_parameters(const LayerTensors& layers) {
  Eigen::Index total = 0;
  for (const auto& layer : layers) total += layer.weights.size() + layer.bias.size();
  Vector flat(total);
  Eigen::Index offset = 0;
  for (const auto& layer : layers) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) flat[offset++] = layer.weights(r, c);
    }
    flat.segment(offset, layer.bias.size()) = layer.bias;
    offset += layer.bias.size();
  }
  return flat;
}

void unflatten_parameters(const Vector& flat, LayerTensors& layers) {
  Eigen::Index offset = 0;
  for (auto& layer : layers) {
    if (offset + layer.weights.size() + layer.bias.size() > flat.size()) {
      fail(ErrorCode::kDimensionMismatch, "flat parameter vector too short");
    }
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = flat[offset++];
    }
    layer.bias = flat.segment(offset, layer.bias.size());
    offset += layer.bias.size();
  }
  if (offset != flat.size()) fail(ErrorCode::kDimensionMismatch, "flat parameter vector too long");
}

double weight_norm_squared(const LayerTensors& layers) {
  double total = 0.0;
  for (const auto& layer : layers) total += layer.weights.squaredNorm();
  return total;
}

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint) {
  const auto& params = checkpoint.params;
  nlohmann::json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = kCheckpointVersion;
  doc["dims"] = params.dims();
  doc["layout"] = {{"n", params.n}, {"m", params.m}, {"order", "row-major"}};
  doc["input"] = {{"fields", "t,u,y"}, {"time_scale", checkpoint.scaling.time_scale}};
  doc["activation"] = {{"hidden", "tanh"}, {"output", "affine"}};
  doc["seed"] = checkpoint.seed;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : params.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      std::vector<double> row(layer.weights.cols());
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row[c] = layer.weights(r, c);
      rows.push_back(row);
    }
    std::vector<double> bias(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back({{"weights", rows}, {"bias", bias}});
  }
  doc["layers"] = layers;
  if (!checkpoint.provenance.is_null()) doc["provenance"] = checkpoint.provenance;
  return doc;
}

Checkpoint checkpoint_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      fail(ErrorCode::kConfig, "not a gain network checkpoint");
    }
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      fail(ErrorCode::kConfig, "unsupported checkpoint version");
    }
    if (doc.at("layout").at("order").get<std::string>() != "row-major") {
      fail(ErrorCode::kConfig, "unsupported gain layout");
    }
    Checkpoint checkpoint;
    checkpoint.params.n = doc.at("layout").at("n").get<int>();
    checkpoint.params.m = doc.at("layout").at("m").get<int>();
    checkpoint.scaling.time_scale = doc.at("input").at("time_scale").get<double>();
    checkpoint.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& entry : doc.at("layers")) {
      const auto rows = entry.at("weights").get<std::vector<std::vector<double>>>();
      const auto bias = entry.at("bias").get<std::vector<double>>();
      DenseLayer layer;
      const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size());
      layer.weights.resize(static_cast<Eigen::Index>(rows.size()), cols);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != cols) {
          fail(ErrorCode::kConfig, "ragged weight matrix in checkpoint");
        }
        for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = rows[r][c];
      }
      layer.bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
      checkpoint.params.layers.push_back(std::move(layer));
    }
    if (doc.at("dims").get<std::vector<int>>() != checkpoint.params.dims()) {
      fail(ErrorCode::kConfig, "checkpoint dims disagree with stored layers");
    }
    if (doc.contains("provenance")) checkpoint.provenance = doc["provenance"];
    checkpoint.params.validate();
    return checkpoint;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write checkpoint " + path.string());
  out << checkpoint_to_json(checkpoint).dump(1) << '\n';
  if (!out) fail(ErrorCode::kIo, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read checkpoint " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, "checkpoint " + path.string() + " is not JSON: " + e.what());
  }
  return checkpoint_from_json(doc);
}

}  // namespace softsensor
