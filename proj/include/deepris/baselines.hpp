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

#include "deepris/channel.hpp"
#include "deepris/modem.hpp"
#include "deepris/rng.hpp"

namespace deepris {

/// Scalar channel seen by a single-antenna destination after cascade,
/// reflection, beamforming, and large-scale attenuation.
struct EffectiveChannel {
    cd gain;
    double noise_variance = 0.0;
};

/// Receiver knowledge of the effective channel. error_fraction = 0 is perfect CSI.
struct CsiQuality {
    double error_fraction = 0.0;

    static CsiQuality perfect() { return {}; }
    static CsiQuality imperfect(double rho) { return {rho}; }
    bool is_perfect() const { return error_fraction == 0.0; }
    void validate() const;
};

/// sqrt(pathloss) (h_d^H Phi^H H_s^H) v. Equals the noiseless output of
/// transmit() divided by the symbol.
EffectiveChannel effective_channel(const ChannelRealization& ch, const PhaseConfig& phases, const Beamformer& v,
                                   double noise_variance = 0.0);

/// Gauss-Markov estimate: sqrt(1 - rho) g + sqrt(rho) |g| e with e ~ CN(0, 1).
/// rho = 0 returns g without consuming randomness.
cd corrupt_csi(cd gain, const CsiQuality& q, Rng& rng);

/// Zero-forcing estimate y / g_hat. Throws NumericError for g_hat = 0.
cd detect_ls(cd received, cd gain_estimate);

/// Scalar Wiener estimate conj(g_hat) y / (|g_hat|^2 + sigma^2); zero when the
/// denominator vanishes.
cd detect_mmse(cd received, cd gain_estimate, double noise_variance);

/// argmin_s |y - g_hat s|^2 over the constellation, lowest index on ties.
int detect_ml(cd received, cd gain_estimate, const Constellation& c);

}  // namespace deepris
