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

#ifndef SOFTSENSOR_CORE_GAINNET_HPP
#define SOFTSENSOR_CORE_GAINNET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/observer.hpp"
#include "core/systems.hpp"

namespace softsensor {

struct DenseLayer {
  Matrix weights;  // fan_out x fan_in
  Vector bias;     // fan_out
};

/// Per-layer tensors shaped like the network; used for gradients and Adam
/// moments.
using LayerTensors = std::vector<DenseLayer>;

/// Feedforward gain network z = [t, u, y] -> vec(L). Hidden layers use tanh,
/// the output layer is affine. L (n x m) is flattened row-major:
/// output index i*m + j holds L(i, j).
struct GainNetworkParams {
  LayerTensors layers;
  int n = 0;
  int m = 0;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::vector<int> dims() const;
  std::size_t parameter_count() const;
  void validate() const;
};

/// Uniform Glorot initialization on +-sqrt(6 / (fan_in + fan_out)), zero
/// biases. dims = {input, hidden..., n*m}.
GainNetworkParams xavier_init(const std::vector<int>& dims, int n, int m,
                              std::uint64_t seed);

/// Activations saved by the forward pass. activations[0] is the input batch,
/// activations[i] the tanh output of hidden layer i (one column per sample).
struct ForwardCache {
  std::vector<Matrix> activations;
};

/// Batched forward pass over the columns of `inputs`; returns one flattened
/// gain per column.
Matrix forward_batch(const GainNetworkParams& params, const Matrix& inputs,
                     ForwardCache* cache);

/// Reverse pass for forward_batch. Gradients are summed over the batch.
LayerTensors backward_batch(const GainNetworkParams& params,
                            const ForwardCache& cache, const Matrix& d_outputs,
                            Matrix* d_inputs);

struct ForwardResult {
  Matrix gain;  // n x m
  ForwardCache cache;
};

ForwardResult forward(const GainNetworkParams& params, const Vector& z);

struct BackwardResult {
  LayerTensors d_params;
  Vector d_input;
};

BackwardResult backward(const GainNetworkParams& params, const ForwardCache& cache,
                        const Matrix& d_gain);

Matrix reshape_gain(const Eigen::Ref<const Vector>& flat, int n, int m);
Vector flatten_gain(const Matrix& gain);

/// Time enters the network as t / time_scale.
struct InputScaling {
  double time_scale = 1.0;
};

Vector assemble_input(double t, const Vector& u, const Vector& y,
                      const InputScaling& scaling);

GainProvider make_gain_provider(GainNetworkParams params, InputScaling scaling);

LayerTensors zeros_like(const LayerTensors& layers);
Vector flatten_parameters(const LayerTensors& layers);
void unflatten_parameters(const Vector& flat, LayerTensors& layers);

/// Sum of squared Frobenius norms of the weight matrices (biases excluded).
double weight_norm_squared(const LayerTensors& layers);

struct Checkpoint {
  GainNetworkParams params;
  InputScaling scaling;
  std::uint64_t seed = 0;
  nlohmann::json provenance;  // free-form echo of the training setup
};

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace softsensor

#endif  // SOFTSENSOR_CORE_GAINNET_HPP
