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

#include "deepris/link.hpp"

#include <cmath>

#include "deepris/baselines.hpp"
#include "deepris/error.hpp"

namespace deepris {

void LinkConfig::validate() const {
    if (elements < 1) throw ConfigError("N", "number of reflecting elements must be >= 1");
    if (antennas < 1) throw ConfigError("M", "number of antennas must be >= 1");
    if (frame_len < 1) throw ConfigError("frame_len", "frame length must be >= 1");
    if (!(p_max > 0.0)) throw ConfigError("p_max", "transmit power must be positive");
    if (!pathloss.unit && !(pathloss.distance > 0.0)) throw ConfigError("distance", "distance must be positive");
    fading.validate();
    build_constellation(modulation);
}

double LinkConfig::reference_gain() const {
    const double n = elements;
    const double m = antennas;
    // Unit channels make every cascade entry equal N, so |g|^2 = P M N^2.
    const double cascade = identity_channel ? m * n * n : m * n;
    return pathloss.gain() * p_max * cascade;
}

double LinkConfig::noise_variance(double snr_db) const {
    return reference_gain() / std::pow(10.0, snr_db / 10.0);
}

kv::Entries LinkConfig::to_entries(const std::string& prefix) const {
    kv::Entries e;
    e.emplace_back(prefix + "N", std::to_string(elements));
    e.emplace_back(prefix + "M", std::to_string(antennas));
    e.emplace_back(prefix + "frame_len", std::to_string(frame_len));
    e.emplace_back(prefix + "modulation", std::to_string(modulation));
    e.emplace_back(prefix + "fading", fading.kind == FadingKind::Rayleigh ? "rayleigh" : "nakagami");
    e.emplace_back(prefix + "nakagami_m", kv::format_double(fading.m));
    e.emplace_back(prefix + "nakagami_omega", kv::format_double(fading.omega));
    e.emplace_back(prefix + "p_max", kv::format_double(p_max));
    e.emplace_back(prefix + "unit_pathloss", pathloss.unit ? "1" : "0");
    e.emplace_back(prefix + "distance", kv::format_double(pathloss.distance));
    e.emplace_back(prefix + "identity_channel", identity_channel ? "1" : "0");
    return e;
}

Frame simulate_frame(const LinkConfig& link, double noise_variance, const Constellation& c, Rng& rng) {
    const auto n_bits = static_cast<std::size_t>(link.frame_len * c.bits_per_symbol);
    Frame f;
    f.noise_variance = noise_variance;
    f.bits.resize(n_bits);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : f.bits) b = static_cast<std::uint8_t>(bit(rng));
    f.symbols = modulate(f.bits, c);

    ChannelRealization ch;
    PhaseConfig phases;
    if (link.identity_channel) {
        ch = unit_realization(link.elements, link.antennas);
        ch.pathloss_gain = link.pathloss.gain();
        phases = PhaseConfig::unit(link.elements);
    } else {
        ch = sample_realization(link.elements, link.antennas, link.fading, link.pathloss.gain(), rng);
        phases = random_phases(link.elements, rng);
    }
    const Beamformer v = mrt_beamformer(ch, phases, link.p_max);
    Eigen::MatrixXcd x(1, link.frame_len);
    for (int t = 0; t < link.frame_len; ++t) x(0, t) = f.symbols[static_cast<std::size_t>(t)];
    f.received = transmit(ch, phases, std::span<const Beamformer>(&v, 1), x, NoiseModel{noise_variance}, rng);
    f.gain = effective_channel(ch, phases, v).gain;
    return f;
}

}  // namespace deepris
