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

#include "deepris/neural.hpp"

#include <cmath>
#include <string>

#include "deepris/error.hpp"

namespace deepris {

namespace {

Eigen::MatrixXd apply_hidden(Activation a, const Eigen::MatrixXd& pre) {
    if (a == Activation::Tanh) return pre.array().tanh().matrix();
    return pre.cwiseMax(0.0);
}

// d sigma / d pre, expressed through the cached pre-activation and activation.
Eigen::MatrixXd hidden_derivative(Activation a, const Eigen::MatrixXd& pre, const Eigen::MatrixXd& act) {
    if (a == Activation::Tanh) return (1.0 - act.array().square()).matrix();
    return (pre.array() > 0.0).cast<double>().matrix();
}

Eigen::MatrixXd make_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
    if (!(p >= 0.0 && p < 1.0)) throw NumericError("dropout probability must lie in [0, 1)");
    const double keep_scale = 1.0 / (1.0 - p);
    std::bernoulli_distribution keep(1.0 - p);
    Eigen::MatrixXd mask(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = keep(rng) ? keep_scale : 0.0;
    }
    return mask;
}

}  // namespace

double activate(Activation a, double x) {
    return a == Activation::Tanh ? std::tanh(x) : (x > 0.0 ? x : 0.0);
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
    }
    return n;
}

double MlpParams::weight_square_sum() const {
    double s = 0.0;
    for (const auto& w : weights) s += w.squaredNorm();
    return s;
}

Gradients Gradients::zeros_like(const MlpParams& p) {
    Gradients g;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        g.weights.push_back(Eigen::MatrixXd::Zero(p.weights[i].rows(), p.weights[i].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(p.biases[i].size()));
    }
    return g;
}

MlpParams init_mlp(std::span<const int> dims, double output_scale, Rng& rng, Activation hidden) {
    if (dims.size() < 2) throw NumericError("init_mlp: need at least input and output dims");
    for (int d : dims) {
        if (d <= 0) throw NumericError("init_mlp: layer sizes must be positive");
    }
    MlpParams p;
    p.dims.assign(dims.begin(), dims.end());
    p.output_scale = output_scale;
    p.hidden = hidden;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[i] + dims[i + 1]));
        std::uniform_real_distribution<double> u(-bound, bound);
        Eigen::MatrixXd w(dims[i + 1], dims[i]);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::VectorXd::Zero(dims[i + 1]));
    }
    return p;
}

ForwardResult forward(const MlpParams& p, const Eigen::MatrixXd& input, const ForwardMode& mode) {
    if (p.weights.empty()) throw NumericError("forward: network has no layers");
    if (input.rows() != p.dims.front()) {
        throw NumericError("forward: input has " + std::to_string(input.rows()) + " features, expected " +
                           std::to_string(p.dims.front()));
    }
    const std::size_t layers = p.layer_count();
    ForwardResult r;
    ForwardCache& c = r.cache;
    c.revision = p.revision;
    c.batch = input.cols();
    c.layer_inputs.reserve(layers);
    c.pre_activations.reserve(layers);
    c.activations.reserve(layers);

    Eigen::MatrixXd x = input;
    for (std::size_t i = 0; i < layers; ++i) {
        Eigen::MatrixXd pre = p.weights[i] * x;
        pre.colwise() += p.biases[i];
        const bool is_output = i + 1 == layers;
        Eigen::MatrixXd act = is_output ? Eigen::MatrixXd(pre.array().tanh().matrix()) : apply_hidden(p.hidden, pre);
        c.layer_inputs.push_back(std::move(x));
        x = act;
        // Dropout sits after the final hidden layer only.
        if (i + 2 == layers) {
            if (const auto* t = std::get_if<TrainMode>(&mode)) {
                if (t->rng == nullptr) throw NumericError("forward: train mode requires an RNG");
                c.mask = make_mask(x.rows(), x.cols(), t->drop_probability, *t->rng);
            } else if (const auto* f = std::get_if<FixedMaskMode>(&mode)) {
                if (f->mask.rows() != x.rows() || f->mask.cols() != x.cols()) {
                    throw NumericError("forward: fixed dropout mask has the wrong shape");
                }
                c.mask = f->mask;
            }
            if (c.mask.size() != 0) x = x.cwiseProduct(c.mask);
        }
        c.pre_activations.push_back(std::move(pre));
        c.activations.push_back(std::move(act));
    }
    r.output = p.output_scale * x;
    return r;
}

Eigen::VectorXd predict(const MlpParams& p, const Eigen::VectorXd& input) {
    return forward(p, Eigen::MatrixXd(input), InferMode{}).output.col(0);
}

LossValue loss(const Eigen::MatrixXd& output, const Eigen::MatrixXd& target, const MlpParams& p, double lambda) {
    if (lambda < 0.0) throw ConfigError("lambda", "regularization weight must be >= 0");
    if (output.rows() != target.rows() || output.cols() != target.cols()) {
        throw NumericError("loss: output and target shapes differ");
    }
    if (output.cols() == 0) throw NumericError("loss: empty batch");
    LossValue v;
    v.mse_part = (output - target).squaredNorm() / static_cast<double>(output.cols());
    v.l2_part = lambda * p.weight_square_sum();
    v.total = v.mse_part + v.l2_part;
    return v;
}

Gradients backward(const MlpParams& p, const ForwardCache& cache, const Eigen::MatrixXd& target, double lambda) {
    const std::size_t layers = p.layer_count();
    if (cache.revision != p.revision || cache.activations.size() != layers) {
        throw NumericError("backward: forward cache is stale for these parameters");
    }
    if (target.cols() != cache.batch || target.rows() != p.dims.back()) {
        throw NumericError("backward: target shape does not match the cached batch");
    }
    Gradients g;
    g.weights.resize(layers);
    g.biases.resize(layers);

    const double z = p.output_scale;
    const Eigen::MatrixXd& out_tanh = cache.activations.back();
    // d/d out of (1/B) |out - t|^2, then through out = z tanh(pre).
    Eigen::MatrixXd delta = (2.0 / static_cast<double>(cache.batch)) * (z * out_tanh - target);
    delta = (delta.array() * z * (1.0 - out_tanh.array().square())).matrix();

    for (std::size_t k = layers; k-- > 0;) {
        g.weights[k].noalias() = delta * cache.layer_inputs[k].transpose();
        g.weights[k] += 2.0 * lambda * p.weights[k];
        g.biases[k] = delta.rowwise().sum();
        if (k == 0) break;
        Eigen::MatrixXd upstream = p.weights[k].transpose() * delta;
        if (k + 1 == layers && cache.mask.size() != 0) upstream = upstream.cwiseProduct(cache.mask);
        delta = upstream.cwiseProduct(hidden_derivative(p.hidden, cache.pre_activations[k - 1], cache.activations[k - 1]));
    }
    return g;
}

AdamState AdamState::fresh(const MlpParams& p, const AdamConfig& cfg) {
    AdamState s;
    s.config = cfg;
    const Gradients zero = Gradients::zeros_like(p);
    s.m_weights = zero.weights;
    s.v_weights = zero.weights;
    s.m_biases = zero.biases;
    s.v_biases = zero.biases;
    return s;
}

namespace {

template <typename Param>
void adam_update(Param& theta, const Param& grad, Param& m, Param& v, const AdamConfig& c, double corr1,
                 double corr2) {
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
    if (c.bias_correction) {
        theta.array() -= c.learning_rate * (m.array() / corr1) / ((v.array() / corr2).sqrt() + c.epsilon);
    } else {
        theta.array() -= c.learning_rate * m.array() / (v.array() + c.epsilon).sqrt();
    }
}

}  // namespace

void adam_step(MlpParams& p, const Gradients& g, AdamState& s) {
    const std::size_t layers = p.layer_count();
    if (g.weights.size() != layers || s.m_weights.size() != layers) {
        throw NumericError("adam_step: gradient/state layout does not match parameters");
    }
    ++s.step;
    const double t = static_cast<double>(s.step);
    const double corr1 = 1.0 - std::pow(s.config.beta1, t);
    const double corr2 = 1.0 - std::pow(s.config.beta2, t);
    for (std::size_t i = 0; i < layers; ++i) {
        if (g.weights[i].rows() != p.weights[i].rows() || g.weights[i].cols() != p.weights[i].cols()) {
            throw NumericError("adam_step: gradient shape mismatch");
        }
        adam_update(p.weights[i], g.weights[i], s.m_weights[i], s.v_weights[i], s.config, corr1, corr2);
        adam_update(p.biases[i], g.biases[i], s.m_biases[i], s.v_biases[i], s.config, corr1, corr2);
    }
    ++p.revision;
}

}  // namespace deepris
