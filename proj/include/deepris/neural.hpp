/*
   Copyright 2026 The DeepRIS Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "deepris/rng.hpp"

namespace deepris {

enum class Activation { Tanh, Relu };

double activate(Activation a, double x);

/// Fully connected network. Layer i maps dims[i] -> dims[i + 1]; every layer
/// but the last applies the hidden activation, and the last applies
/// output_scale * tanh so outputs stay inside [-output_scale, output_scale].
struct MlpParams {
    std::vector<int> dims;
    std::vector<Eigen::MatrixXd> weights;  // dims[i+1] x dims[i]
    std::vector<Eigen::VectorXd> biases;   // dims[i+1]
    double output_scale = 1.0;
    Activation hidden = Activation::Tanh;
    /// Bumped on every parameter update; forward caches remember it.
    std::uint64_t revision = 0;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;
    double weight_square_sum() const;
};

/// Same layout as MlpParams.
struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static Gradients zeros_like(const MlpParams& p);
};

struct InferMode {};

/// Inverted dropout with drop probability p after the final hidden layer.
struct TrainMode {
    double drop_probability = 0.5;
    Rng* rng = nullptr;
};

/// Train mode with a caller-supplied mask (entries 0 or 1/(1 - p)); lets
/// finite-difference checks replay one mask.
struct FixedMaskMode {
    Eigen::MatrixXd mask;
};

using ForwardMode = std::variant<InferMode, TrainMode, FixedMaskMode>;

/// Everything backward() needs. Column b of each matrix belongs to sample b.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> layer_inputs;    // input fed to layer i (after dropout)
    std::vector<Eigen::MatrixXd> pre_activations; // W_i x + b_i
    std::vector<Eigen::MatrixXd> activations;     // sigma(pre); tanh(pre) for the output layer
    Eigen::MatrixXd mask;                         // empty unless a train mode was used
    std::uint64_t revision = 0;
    Eigen::Index batch = 0;
};

struct ForwardResult {
    Eigen::MatrixXd output;
    ForwardCache cache;
};

struct LossValue {
    double total = 0.0;
    double mse_part = 0.0;
    double l2_part = 0.0;  // lambda * sum of squared weights
};

/// Biases zero; weights i.i.d. uniform on +-sqrt(6 / (fan_in + fan_out)).
/// Throws NumericError for fewer than two dims or a nonpositive dim.
MlpParams init_mlp(std::span<const int> dims, double output_scale, Rng& rng,
                   Activation hidden = Activation::Tanh);

/// Batched forward pass; `input` is dims[0] x batch.
ForwardResult forward(const MlpParams& p, const Eigen::MatrixXd& input, const ForwardMode& mode = InferMode{});

Eigen::VectorXd predict(const MlpParams& p, const Eigen::VectorXd& input);

/// (1 / batch) sum_b |out_b - target_b|^2 + lambda * sum of squared weights.
LossValue loss(const Eigen::MatrixXd& output, const Eigen::MatrixXd& target, const MlpParams& p, double lambda);

/// Exact gradient of loss(...).total. Throws NumericError if the cache came
/// from a different parameter revision or shape.
Gradients backward(const MlpParams& p, const ForwardCache& cache, const Eigen::MatrixXd& target, double lambda);

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Off: theta -= lr m / sqrt(v + eps). On: the usual corrected
    /// theta -= lr m_hat / (sqrt(v_hat) + eps).
    bool bias_correction = false;
};

struct AdamState {
    AdamConfig config;
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
    std::uint64_t step = 0;

    static AdamState fresh(const MlpParams& p, const AdamConfig& cfg);
};

/// One moment update followed by the parameter step. Mutates both arguments.
void adam_step(MlpParams& p, const Gradients& g, AdamState& s);

}  // namespace deepris
