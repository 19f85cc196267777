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

#include <string>

#include "deepris/channel.hpp"
#include "deepris/kv.hpp"
#include "deepris/modem.hpp"
#include "deepris/rng.hpp"

namespace deepris {

/// Physical layout of one simulated RIS link. Channels and RIS phases are
/// drawn fresh per coherence frame of `frame_len` symbols and held fixed
/// across it; the source applies MRT on the resulting cascade.
struct LinkConfig {
    int elements = 64;   // N
    int antennas = 32;   // M
    int frame_len = 16;  // L
    int modulation = 4;
    FadingModel fading;
    double p_max = 1.0;
    PathlossConfig pathloss;
    /// All-ones channels with theta = 0 instead of random draws.
    bool identity_channel = false;

    void validate() const;
    /// Mean |g|^2 of the effective channel under nominal unit-power fading;
    /// the SNR axis is defined against this value.
    double reference_gain() const;
    /// sigma^2 = reference_gain / 10^(snr_db / 10).
    double noise_variance(double snr_db) const;

    kv::Entries to_entries(const std::string& prefix = "") const;
};

/// One simulated coherence frame.
struct Frame {
    Bits bits;
    std::vector<cd> symbols;
    Eigen::VectorXcd received;
    cd gain;  // true effective channel including pathloss
    double noise_variance = 0.0;
};

Frame simulate_frame(const LinkConfig& link, double noise_variance, const Constellation& c, Rng& rng);

}  // namespace deepris
