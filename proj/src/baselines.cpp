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

#include "deepris/baselines.hpp"

#include <cmath>
#include <string>

#include "deepris/error.hpp"

namespace deepris {

void CsiQuality::validate() const {
    if (!(error_fraction >= 0.0 && error_fraction <= 1.0)) {
        throw ConfigError("rho", "CSI error fraction must lie in [0, 1], got " + std::to_string(error_fraction));
    }
}

EffectiveChannel effective_channel(const ChannelRealization& ch, const PhaseConfig& phases, const Beamformer& v,
                                   double noise_variance) {
    if (v.weights.size() != ch.antennas()) throw NumericError("effective_channel: beamformer length mismatch");
    const Eigen::RowVectorXcd g = cascaded_row(ch, phases);
    return {std::sqrt(ch.pathloss_gain) * (g * v.weights).value(), noise_variance};
}

cd corrupt_csi(cd gain, const CsiQuality& q, Rng& rng) {
    q.validate();
    if (q.is_perfect()) return gain;
    const cd e = complex_normal(rng, 1.0);
    return std::sqrt(1.0 - q.error_fraction) * gain + std::sqrt(q.error_fraction) * std::abs(gain) * e;
}

cd detect_ls(cd received, cd gain_estimate) {
    if (gain_estimate == cd(0.0, 0.0)) throw NumericError("detect_ls: zero channel estimate");
    return received / gain_estimate;
}

cd detect_mmse(cd received, cd gain_estimate, double noise_variance) {
    if (noise_variance < 0.0) throw NumericError("detect_mmse: negative noise variance");
    const double denom = std::norm(gain_estimate) + noise_variance;
    if (denom == 0.0) return {0.0, 0.0};
    return std::conj(gain_estimate) * received / denom;
}

int detect_ml(cd received, cd gain_estimate, const Constellation& c) {
    int best = 0;
    double best_d = std::norm(received - gain_estimate * c.points[0]);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const double d = std::norm(received - gain_estimate * c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace deepris
