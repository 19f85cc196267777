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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deepris/baselines.hpp"
#include "deepris/link.hpp"
#include "deepris/training.hpp"

namespace deepris {

enum class DetectorKind { DeepRIS, LS, MMSE, ML, Genie, CoinFlip };

const char* to_string(DetectorKind k);
DetectorKind detector_from_string(const std::string& s);

/// One evaluation condition: link geometry and fading, receiver CSI quality,
/// the SNR grid, and which detectors to run.
struct Scenario {
    std::string label;
    CsiQuality csi;
    LinkConfig link;
    std::vector<double> snr_grid_db;
    std::vector<DetectorKind> detectors{DetectorKind::DeepRIS, DetectorKind::LS, DetectorKind::MMSE,
                                        DetectorKind::ML};

    /// Throws ConfigError for a non-increasing SNR grid or an invalid link.
    void validate() const;
};

/// Per SNR point: stop once (bits >= min_bits and errors >= min_errors) or
/// bits >= max_bits, checked after every frame.
struct StopRule {
    std::uint64_t min_bits = 100'000;
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 10'000'000;
};

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    double ber = 0.0;
    double ci95 = 0.0;  // normal-approximation binomial half-width
};

struct BerCurve {
    std::string scenario;
    std::string detector;
    std::uint64_t seed = 0;
    std::vector<BerPoint> points;
};

/// 1.96 sqrt(p (1 - p) / n) with p = errors / bits.
double binomial_half_width(std::uint64_t errors, std::uint64_t bits);

/// What a detector sees for one frame. `true_frame` is only for the genie.
struct Observation {
    const Frame* true_frame = nullptr;
    cd gain_estimate;
    double noise_variance = 0.0;
    std::uint64_t stream = 0;  // seed for any detector-side randomness
};

class Detector {
public:
    virtual ~Detector() = default;
    virtual std::string name() const = 0;
    /// Throws NumericError if this detector cannot run the scenario.
    virtual void check(const Scenario&) const {}
    /// Decided bits for each observation, in order.
    virtual std::vector<Bits> detect(std::span<const Observation> batch, const Constellation& c) = 0;
};

/// Detectors over the (possibly corrupted) scalar channel estimate.
std::unique_ptr<Detector> make_ls_detector();
std::unique_ptr<Detector> make_mmse_detector();
std::unique_ptr<Detector> make_ml_detector();
std::unique_ptr<Detector> make_genie_detector();
std::unique_ptr<Detector> make_coin_flip_detector();
/// Blind neural detector; uses only the received samples.
std::unique_ptr<Detector> make_neural_detector(Checkpoint checkpoint);

/// Frames for SNR point s and frame k come from stream (seed, s, k), so every
/// detector measured with the same seed sees the same frames.
BerCurve measure_ber(Detector& detector, const Scenario& sc, const StopRule& stop, std::uint64_t seed);

/// Runs every detector listed in each scenario. DeepRIS entries need a checkpoint.
std::vector<BerCurve> run_scenario_suite(const Checkpoint* checkpoint, std::span<const Scenario> scenarios,
                                         const StopRule& stop, std::uint64_t seed);

/// Perfect CSI, imperfect CSI (rho), Nakagami(1, 2) channel mismatch, and
/// N mismatch at N/2 and 2N relative to `trained`.
std::vector<Scenario> default_scenarios(const LinkConfig& trained, const std::vector<double>& snr_grid_db,
                                        double rho);

struct ComplexityReport {
    std::vector<std::uint64_t> nodes;  // p, q, r, s, ...
    std::uint64_t iterations = 0;      // k
    std::uint64_t samples = 0;         // t
    std::uint64_t inference_mults = 0; // qp + rq + sr
    std::uint64_t training_mults = 0;  // k t (qp + rq + sr)
};

/// Throws NumericError with fewer than four node counts.
ComplexityReport complexity_report(std::span<const std::uint64_t> nodes, std::uint64_t iterations,
                                   std::uint64_t samples);

struct LearningRateRun {
    double learning_rate = 0.0;
    TrainHistory history;
    /// Set when the run diverged or never improved on its first epoch.
    bool unstable = false;
};

/// Non-finite losses, a best epoch of 1 with later epochs present, or a final
/// validation loss above the first.
bool is_unstable(const TrainHistory& h);

/// One training run per rate on the same data and seed.
std::vector<LearningRateRun> learning_rate_study(const Dataset& d, std::span<const double> rates,
                                                 const TrainConfig& cfg);

}  // namespace deepris
