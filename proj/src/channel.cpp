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

#include "deepris/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "deepris/error.hpp"

namespace deepris {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod can return exactly 2 pi after the shift for tiny negative inputs.
    return w >= kTwoPi ? 0.0 : w;
}

cd sample_coefficient(const FadingModel& model, Rng& rng) {
    if (model.kind == FadingKind::Rayleigh) return complex_normal(rng, 1.0);
    std::gamma_distribution<double> power(model.m, model.omega / model.m);
    const double magnitude = std::sqrt(power(rng));
    const double phase = uniform_real(rng, 0.0, kTwoPi);
    return std::polar(magnitude, phase);
}

}  // namespace

void FadingModel::validate() const {
    if (kind == FadingKind::Rayleigh) return;
    if (!(m >= 0.5)) throw ConfigError("nakagami_m", "shape m must be >= 0.5, got " + std::to_string(m));
    if (!(omega > 0.0)) {
        throw ConfigError("nakagami_omega", "spread omega must be > 0, got " + std::to_string(omega));
    }
}

PhaseConfig PhaseConfig::unit(Eigen::Index n) {
    return {Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n)};
}

Eigen::VectorXcd PhaseConfig::coefficients() const {
    Eigen::VectorXcd c(angles.size());
    for (Eigen::Index i = 0; i < angles.size(); ++i) c[i] = std::polar(amplitudes[i], angles[i]);
    return c;
}

double PathlossConfig::gain() const { return unit ? 1.0 : pathloss(distance); }

Eigen::MatrixXcd sample_channel(Eigen::Index rows, Eigen::Index cols, const FadingModel& model, Rng& rng) {
    if (rows <= 0 || cols <= 0) throw NumericError("sample_channel: dimensions must be positive");
    model.validate();
    Eigen::MatrixXcd h(rows, cols);
    // Fill row-major so a given seed yields the same entries regardless of storage order.
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) h(r, c) = sample_coefficient(model, rng);
    }
    return h;
}

ChannelRealization sample_realization(Eigen::Index elements, Eigen::Index antennas, const FadingModel& model,
                                      double pathloss_gain, Rng& rng) {
    if (!(pathloss_gain > 0.0)) throw NumericError("pathloss gain must be positive");
    ChannelRealization ch;
    ch.source_to_ris = sample_channel(elements, antennas, model, rng);
    ch.ris_to_dest = sample_channel(elements, 1, model, rng).col(0);
    ch.fading = model;
    ch.pathloss_gain = pathloss_gain;
    return ch;
}

ChannelRealization unit_realization(Eigen::Index elements, Eigen::Index antennas) {
    ChannelRealization ch;
    ch.source_to_ris = Eigen::MatrixXcd::Ones(elements, antennas);
    ch.ris_to_dest = Eigen::VectorXcd::Ones(elements);
    return ch;
}

double pathloss(double distance) {
    if (!(distance > 0.0)) throw NumericError("pathloss: distance must be positive");
    return 1e-2 * std::pow(distance, -3.75);
}

PhaseConfig random_phases(Eigen::Index elements, Rng& rng) {
    PhaseConfig cfg = PhaseConfig::unit(elements);
    for (Eigen::Index i = 0; i < elements; ++i) cfg.angles[i] = uniform_real(rng, 0.0, kTwoPi);
    return cfg;
}

Eigen::MatrixXcd build_phase_matrix(const PhaseConfig& cfg) {
    return cfg.coefficients().asDiagonal();
}

Eigen::RowVectorXcd cascaded_row(const ChannelRealization& ch, const PhaseConfig& phases) {
    if (phases.angles.size() != ch.elements() || ch.ris_to_dest.size() != ch.elements()) {
        throw NumericError("cascaded_row: RIS element count mismatch");
    }
    // h_d^H Phi^H H_s^H with Phi^H = diag(conj(phi_i)).
    const Eigen::VectorXcd weighted = ch.ris_to_dest.cwiseProduct(phases.coefficients().conjugate());
    return weighted.transpose() * ch.source_to_ris;
}

PhaseConfig cophase(const ChannelRealization& ch, const Beamformer& v) {
    if (v.weights.size() != ch.antennas()) throw NumericError("cophase: beamformer length mismatch");
    const Eigen::VectorXcd incident = ch.source_to_ris * v.weights;
    PhaseConfig cfg = PhaseConfig::unit(ch.elements());
    // conj(phi_i) h_i (H v)_i is real and non-negative when phi_i = e^{j arg(h_i (H v)_i)}.
    for (Eigen::Index i = 0; i < ch.elements(); ++i) {
        cfg.angles[i] = wrap_angle(std::arg(ch.ris_to_dest[i] * incident[i]));
    }
    return cfg;
}

std::pair<double, double> gain_moments(int elements) {
    if (elements < 1) throw NumericError("gain_moments: N must be >= 1");
    constexpr double pi = std::numbers::pi;
    const double n = static_cast<double>(elements);
    return {n * pi / 4.0, n * (1.0 - pi * pi / 16.0)};
}

Beamformer mrt_beamformer(const ChannelRealization& ch, const PhaseConfig& phases, double p_max) {
    const Eigen::RowVectorXcd g = cascaded_row(ch, phases);
    const double norm = g.norm();
    if (!(norm > 0.0)) throw NumericError("mrt_beamformer: effective channel is zero");
    Beamformer b;
    b.p_max = p_max;
    b.weights = std::sqrt(p_max) * g.adjoint() / norm;
    return b;
}

std::pair<PhaseConfig, Beamformer> optimize_single_user(const ChannelRealization& ch, double p_max) {
    const auto m = ch.antennas();
    Beamformer v{Eigen::VectorXcd::Constant(m, cd(std::sqrt(p_max / static_cast<double>(m)), 0.0)), p_max};
    PhaseConfig phases = cophase(ch, v);
    v = mrt_beamformer(ch, phases, p_max);
    phases = cophase(ch, v);
    return {phases, v};
}

Eigen::VectorXcd transmit(const ChannelRealization& ch, const PhaseConfig& phases,
                          std::span<const Beamformer> beams, const Eigen::MatrixXcd& symbols,
                          const NoiseModel& noise, Rng& rng) {
    if (beams.empty()) throw NumericError("transmit: at least one beamformer required");
    if (static_cast<std::size_t>(symbols.rows()) != beams.size()) {
        throw NumericError("transmit: symbol rows must match beamformer count");
    }
    if (noise.variance < 0.0) throw NumericError("transmit: negative noise variance");
    const Eigen::RowVectorXcd g = cascaded_row(ch, phases);
    Eigen::MatrixXcd precoder(ch.antennas(), static_cast<Eigen::Index>(beams.size()));
    for (std::size_t j = 0; j < beams.size(); ++j) {
        if (beams[j].weights.size() != ch.antennas()) throw NumericError("transmit: beamformer length mismatch");
        precoder.col(static_cast<Eigen::Index>(j)) = beams[j].weights;
    }
    Eigen::VectorXcd y = (std::sqrt(ch.pathloss_gain) * (g * precoder * symbols)).transpose();
    if (noise.variance > 0.0) {
        for (Eigen::Index t = 0; t < y.size(); ++t) y[t] += complex_normal(rng, noise.variance);
    }
    return y;
}

double received_snr(const ChannelRealization& ch, const PhaseConfig& phases, std::span<const Beamformer> beams,
                    std::size_t user, double noise_variance) {
    if (user >= beams.size()) throw NumericError("received_snr: user index out of range");
    const Eigen::RowVectorXcd g = cascaded_row(ch, phases);
    const double signal = ch.pathloss_gain * std::norm((g * beams[user].weights).value());
    double interference = 0.0;
    for (std::size_t j = 0; j < beams.size(); ++j) {
        if (j != user) interference += ch.pathloss_gain * std::norm((g * beams[j].weights).value());
    }
    const double denom = interference + noise_variance;
    if (!(denom > 0.0)) throw NumericError("received_snr: noise variance must be positive without interferers");
    return signal / denom;
}

}  // namespace deepris
