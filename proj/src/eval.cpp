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

#include "deepris/eval.hpp"

#include <algorithm>
#include <cmath>

#include "deepris/error.hpp"

namespace deepris {

namespace {

constexpr std::size_t kFramesPerChunk = 256;

class LsDetector final : public Detector {
public:
    std::string name() const override { return "LS"; }
    std::vector<Bits> detect(std::span<const Observation> batch, const Constellation& c) override {
        std::vector<Bits> out(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            for (cd y : batch[i].true_frame->received) {
                append_label(nearest_index(detect_ls(y, batch[i].gain_estimate), c), c, out[i]);
            }
        }
        return out;
    }
};

class MmseDetector final : public Detector {
public:
    std::string name() const override { return "MMSE"; }
    std::vector<Bits> detect(std::span<const Observation> batch, const Constellation& c) override {
        std::vector<Bits> out(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto& o = batch[i];
            for (cd y : o.true_frame->received) {
                append_label(nearest_index(detect_mmse(y, o.gain_estimate, o.noise_variance), c), c, out[i]);
            }
        }
        return out;
    }
};

class MlDetector final : public Detector {
public:
    std::string name() const override { return "ML"; }
    std::vector<Bits> detect(std::span<const Observation> batch, const Constellation& c) override {
        std::vector<Bits> out(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            for (cd y : batch[i].true_frame->received) {
                append_label(detect_ml(y, batch[i].gain_estimate, c), c, out[i]);
            }
        }
        return out;
    }
};

class GenieDetector final : public Detector {
public:
    std::string name() const override { return "genie"; }
    std::vector<Bits> detect(std::span<const Observation> batch, const Constellation&) override {
        std::vector<Bits> out;
        out.reserve(batch.size());
        for (const auto& o : batch) out.push_back(o.true_frame->bits);
        return out;
    }
};

class CoinFlipDetector final : public Detector {
public:
    std::string name() const override { return "coin_flip"; }
    std::vector<Bits> detect(std::span<const Observation> batch, const Constellation&) override {
        std::vector<Bits> out(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            Rng rng(batch[i].stream);
            std::uniform_int_distribution<int> bit(0, 1);
            out[i].resize(batch[i].true_frame->bits.size());
            for (auto& b : out[i]) b = static_cast<std::uint8_t>(bit(rng));
        }
        return out;
    }
};

class NeuralDetector final : public Detector {
public:
    explicit NeuralDetector(Checkpoint ckpt) : ckpt_(std::move(ckpt)) {}

    std::string name() const override { return "DeepRIS"; }

    void check(const Scenario& sc) const override {
        if (sc.link.frame_len != ckpt_.frame_len) {
            throw NumericError("scenario '" + sc.label + "' uses frame length " + std::to_string(sc.link.frame_len) +
                               " but the checkpoint was trained with " + std::to_string(ckpt_.frame_len));
        }
        if (sc.link.modulation != ckpt_.modulation) {
            throw NumericError("scenario '" + sc.label + "' modulation differs from the checkpoint");
        }
    }

    std::vector<Bits> detect(std::span<const Observation> batch, const Constellation& c) override {
        const Eigen::Index features = 2 * ckpt_.frame_len;
        Eigen::MatrixXd x(features, static_cast<Eigen::Index>(batch.size()));
        for (std::size_t i = 0; i < batch.size(); ++i) {
            x.col(static_cast<Eigen::Index>(i)) = encode_interleaved(batch[i].true_frame->received);
        }
        const Eigen::MatrixXd out = forward(ckpt_.params, ckpt_.norm.apply(x), InferMode{}).output;
        std::vector<Bits> bits(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            for (Eigen::Index t = 0; t < ckpt_.frame_len; ++t) {
                append_label(nearest_index(cd(out(2 * t, col), out(2 * t + 1, col)), c), c, bits[i]);
            }
        }
        return bits;
    }

private:
    Checkpoint ckpt_;
};

std::unique_ptr<Detector> make_detector(DetectorKind k, const Checkpoint* ckpt) {
    switch (k) {
        case DetectorKind::DeepRIS:
            if (ckpt == nullptr) throw NumericError("DeepRIS detector requires a checkpoint");
            return make_neural_detector(*ckpt);
        case DetectorKind::LS: return make_ls_detector();
        case DetectorKind::MMSE: return make_mmse_detector();
        case DetectorKind::ML: return make_ml_detector();
        case DetectorKind::Genie: return make_genie_detector();
        case DetectorKind::CoinFlip: return make_coin_flip_detector();
    }
    throw NumericError("unknown detector kind");
}

}  // namespace

const char* to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::DeepRIS: return "DeepRIS";
        case DetectorKind::LS: return "LS";
        case DetectorKind::MMSE: return "MMSE";
        case DetectorKind::ML: return "ML";
        case DetectorKind::Genie: return "genie";
        case DetectorKind::CoinFlip: return "coin_flip";
    }
    return "?";
}

DetectorKind detector_from_string(const std::string& s) {
    for (auto k : {DetectorKind::DeepRIS, DetectorKind::LS, DetectorKind::MMSE, DetectorKind::ML,
                   DetectorKind::Genie, DetectorKind::CoinFlip}) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError("detectors", "unknown detector '" + s + "'");
}

void Scenario::validate() const {
    link.validate();
    csi.validate();
    if (snr_grid_db.empty()) throw ConfigError("eval_snr_db", "SNR grid is empty");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i) {
        if (!(snr_grid_db[i] > snr_grid_db[i - 1])) {
            throw ConfigError("eval_snr_db", "SNR grid must be strictly increasing");
        }
    }
}

std::unique_ptr<Detector> make_ls_detector() { return std::make_unique<LsDetector>(); }
std::unique_ptr<Detector> make_mmse_detector() { return std::make_unique<MmseDetector>(); }
std::unique_ptr<Detector> make_ml_detector() { return std::make_unique<MlDetector>(); }
std::unique_ptr<Detector> make_genie_detector() { return std::make_unique<GenieDetector>(); }
std::unique_ptr<Detector> make_coin_flip_detector() { return std::make_unique<CoinFlipDetector>(); }
std::unique_ptr<Detector> make_neural_detector(Checkpoint checkpoint) {
    return std::make_unique<NeuralDetector>(std::move(checkpoint));
}

double binomial_half_width(std::uint64_t errors, std::uint64_t bits) {
    if (bits == 0) return 0.0;
    const double p = static_cast<double>(errors) / static_cast<double>(bits);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
}

BerCurve measure_ber(Detector& detector, const Scenario& sc, const StopRule& stop, std::uint64_t seed) {
    sc.validate();
    detector.check(sc);
    if (stop.max_bits == 0) throw ConfigError("max_bits", "bit cap must be positive");
    const Constellation c = build_constellation(sc.link.modulation);

    BerCurve curve;
    curve.scenario = sc.label;
    curve.detector = detector.name();
    curve.seed = seed;

    std::vector<Frame> frames(kFramesPerChunk);
    std::vector<Observation> obs(kFramesPerChunk);
    for (std::size_t s = 0; s < sc.snr_grid_db.size(); ++s) {
        const double noise = sc.link.noise_variance(sc.snr_grid_db[s]);
        BerPoint pt;
        pt.snr_db = sc.snr_grid_db[s];
        bool done = false;
        for (std::uint64_t base = 0; !done; base += kFramesPerChunk) {
            for (std::size_t i = 0; i < kFramesPerChunk; ++i) {
                const std::uint64_t k = base + i;
                Rng link_rng = make_stream(seed, {s, k, 0});
                frames[i] = simulate_frame(sc.link, noise, c, link_rng);
                Rng csi_rng = make_stream(seed, {s, k, 1});
                obs[i] = {&frames[i], corrupt_csi(frames[i].gain, sc.csi, csi_rng), noise, stream_seed(seed, {s, k, 2})};
            }
            const std::vector<Bits> decided = detector.detect(obs, c);
            for (std::size_t i = 0; i < kFramesPerChunk && !done; ++i) {
                const Bits& truth = frames[i].bits;
                if (decided[i].size() != truth.size()) throw NumericError("detector returned the wrong bit count");
                for (std::size_t b = 0; b < truth.size(); ++b) pt.errors += decided[i][b] != truth[b];
                pt.bits += truth.size();
                done = (pt.bits >= stop.min_bits && pt.errors >= stop.min_errors) || pt.bits >= stop.max_bits;
            }
        }
        pt.ber = static_cast<double>(pt.errors) / static_cast<double>(pt.bits);
        pt.ci95 = binomial_half_width(pt.errors, pt.bits);
        curve.points.push_back(pt);
    }
    return curve;
}

std::vector<BerCurve> run_scenario_suite(const Checkpoint* checkpoint, std::span<const Scenario> scenarios,
                                         const StopRule& stop, std::uint64_t seed) {
    std::vector<BerCurve> curves;
    for (const Scenario& sc : scenarios) {
        for (DetectorKind k : sc.detectors) {
            auto det = make_detector(k, checkpoint);
            curves.push_back(measure_ber(*det, sc, stop, seed));
        }
    }
    return curves;
}

std::vector<Scenario> default_scenarios(const LinkConfig& trained, const std::vector<double>& snr_grid_db,
                                        double rho) {
    std::vector<Scenario> out;
    Scenario base;
    base.link = trained;
    base.link.fading = FadingModel::rayleigh();
    base.snr_grid_db = snr_grid_db;

    Scenario perfect = base;
    perfect.label = "perfect_csi";
    out.push_back(perfect);

    Scenario imperfect = base;
    imperfect.label = "imperfect_csi_rho" + kv::format_double(rho);
    imperfect.csi = CsiQuality::imperfect(rho);
    out.push_back(imperfect);

    Scenario nakagami = base;
    nakagami.label = "nakagami_m1_omega2";
    nakagami.link.fading = FadingModel::nakagami(1.0, 2.0);
    out.push_back(nakagami);

    for (int n : {trained.elements / 2, trained.elements * 2}) {
        if (n < 1 || n == trained.elements) continue;
        Scenario sc = base;
        sc.label = "n_mismatch_N" + std::to_string(n);
        sc.link.elements = n;
        out.push_back(sc);
    }
    return out;
}

ComplexityReport complexity_report(std::span<const std::uint64_t> nodes, std::uint64_t iterations,
                                   std::uint64_t samples) {
    if (nodes.size() < 4) throw NumericError("complexity_report: need at least four layer node counts");
    ComplexityReport r;
    r.nodes.assign(nodes.begin(), nodes.end());
    r.iterations = iterations;
    r.samples = samples;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) r.inference_mults += nodes[i + 1] * nodes[i];
    r.training_mults = iterations * samples * r.inference_mults;
    return r;
}

std::vector<LearningRateRun> learning_rate_study(const Dataset& d, std::span<const double> rates,
                                                 const TrainConfig& cfg) {
    for (double r : rates) {
        if (!(r > 0.0)) throw ConfigError("learning_rate", "study rates must be positive");
    }
    std::vector<LearningRateRun> runs;
    for (double r : rates) {
        TrainConfig c = cfg;
        c.learning_rate = r;
        TrainHistory h = train(d, c).history;
        const bool unstable = is_unstable(h);
        runs.push_back({r, std::move(h), unstable});
    }
    return runs;
}

bool is_unstable(const TrainHistory& h) {
    if (h.epochs.empty()) return false;
    for (const auto& e : h.epochs) {
        if (!std::isfinite(e.val_loss) || !std::isfinite(e.train_loss)) return true;
    }
    if (h.epochs.size() > 1 && h.best_epoch == 1) return true;
    return h.epochs.back().val_loss > h.epochs.front().val_loss;
}

}  // namespace deepris
