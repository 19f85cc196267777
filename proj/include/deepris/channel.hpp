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

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "deepris/modem.hpp"
#include "deepris/rng.hpp"

namespace deepris {

enum class FadingKind { Rayleigh, Nakagami };

/// Small-scale fading law for every channel coefficient. Rayleigh entries are
/// CN(0, 1); Nakagami entries have Nakagami(m, omega) magnitude and uniform phase.
struct FadingModel {
    FadingKind kind = FadingKind::Rayleigh;
    double m = 1.0;
    double omega = 1.0;

    static FadingModel rayleigh() { return {}; }
    static FadingModel nakagami(double m, double omega) { return {FadingKind::Nakagami, m, omega}; }

    /// Mean power E|h|^2 of one coefficient.
    double mean_power() const { return kind == FadingKind::Rayleigh ? 1.0 : omega; }
    /// Throws ConfigError unless m >= 0.5 and omega > 0.
    void validate() const;
};

/// One coherence block. `source_to_ris` is the N x M matrix H_s^H and
/// `ris_to_dest` holds the N entries of the 1 x N row h_d^H.
struct ChannelRealization {
    Eigen::MatrixXcd source_to_ris;
    Eigen::VectorXcd ris_to_dest;
    FadingModel fading;
    double pathloss_gain = 1.0;

    Eigen::Index elements() const { return source_to_ris.rows(); }
    Eigen::Index antennas() const { return source_to_ris.cols(); }
};

/// Per-element reflection amplitudes chi in [0, 1] and angles theta in [0, 2 pi).
struct PhaseConfig {
    Eigen::VectorXd amplitudes;
    Eigen::VectorXd angles;

    static PhaseConfig unit(Eigen::Index n);  // chi = 1, theta = 0
    Eigen::VectorXcd coefficients() const;    // chi_i e^{j theta_i}
};

struct Beamformer {
    Eigen::VectorXcd weights;
    double p_max = 1.0;
};

struct NoiseModel {
    double variance = 1.0;
};

/// Large-scale attenuation: either the unit bypass or 1e-2 * d^-3.75.
struct PathlossConfig {
    bool unit = true;
    double distance = 1.0;

    double gain() const;
};

Eigen::MatrixXcd sample_channel(Eigen::Index rows, Eigen::Index cols, const FadingModel& model, Rng& rng);

ChannelRealization sample_realization(Eigen::Index elements, Eigen::Index antennas, const FadingModel& model,
                                      double pathloss_gain, Rng& rng);

/// All-ones channels; used for identity-link checks.
ChannelRealization unit_realization(Eigen::Index elements, Eigen::Index antennas);

/// 1e-2 * d^-3.75. Throws NumericError for d <= 0.
double pathloss(double distance);

/// Uniform angles on [0, 2 pi), unit amplitudes.
PhaseConfig random_phases(Eigen::Index elements, Rng& rng);

/// diag(chi_i e^{j theta_i}).
Eigen::MatrixXcd build_phase_matrix(const PhaseConfig& cfg);

/// The 1 x M cascaded row h_d^H Phi^H H_s^H (without pathloss).
Eigen::RowVectorXcd cascaded_row(const ChannelRealization& ch, const PhaseConfig& phases);

/// Angles that align every element's contribution to the effective channel at
/// zero phase, so |h_d^H Phi^H H_s^H v| = sum_i |h_{d,i}| |(H_s^H v)_i|.
PhaseConfig cophase(const ChannelRealization& ch, const Beamformer& v);

/// Mean and variance of the co-phased cascade magnitude A for N Rayleigh
/// elements: (N pi / 4, N (1 - pi^2 / 16)).
std::pair<double, double> gain_moments(int elements);

/// v = sqrt(P_max) g^H / |g| for the cascaded row g. Throws NumericError if g = 0.
Beamformer mrt_beamformer(const ChannelRealization& ch, const PhaseConfig& phases, double p_max);

/// Single-user joint design: uniform v, co-phase, MRT, co-phase once more.
std::pair<PhaseConfig, Beamformer> optimize_single_user(const ChannelRealization& ch, double p_max);

/// Received samples at the destination served by `ch`. `symbols` is U x L
/// (row j carries user j's stream, one beamformer per row). Output has L
/// samples: sqrt(pathloss) g sum_j v_j x_j + n.
Eigen::VectorXcd transmit(const ChannelRealization& ch, const PhaseConfig& phases,
                          std::span<const Beamformer> beams, const Eigen::MatrixXcd& symbols,
                          const NoiseModel& noise, Rng& rng);

/// SINR of user `user` per the multi-user interference formula, including
/// the realization's pathloss gain on every beam term.
double received_snr(const ChannelRealization& ch, const PhaseConfig& phases, std::span<const Beamformer> beams,
                    std::size_t user, double noise_variance);

}  // namespace deepris
