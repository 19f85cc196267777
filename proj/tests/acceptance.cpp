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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "deepris/baselines.hpp"
#include "deepris/channel.hpp"
#include "deepris/config.hpp"
#include "deepris/eval.hpp"
#include "deepris/io.hpp"
#include "deepris/kv.hpp"
#include "deepris/modem.hpp"
#include "deepris/neural.hpp"
#include "deepris/training.hpp"

namespace {

using namespace deepris;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// ---------------------------------------------------------------- 1

Outcome gradient_check() {
    Rng rng(101);
    const std::vector<std::vector<int>> nets{
        {6, 9, 7, 5, 6}, {4, 12, 8, 6, 4}, {8, 10, 6, 4, 8}, {3, 5, 4, 4, 2, 3}, {10, 16, 12, 8, 10}, {2, 4, 3, 3, 2}};
    const double h = 1e-5;
    double worst = 0.0;
    for (const auto& dims : nets) {
        MlpParams p = init_mlp(dims, 1.0 / std::sqrt(2.0), rng);
        for (auto& b : p.biases)
            for (Eigen::Index k = 0; k < b.size(); ++k) b[k] = uniform_real(rng, -0.3, 0.3);
        const Eigen::Index batch = 4;
        Eigen::MatrixXd x(dims.front(), batch), t(dims.back(), batch), mask(dims[dims.size() - 2], batch);
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = uniform_real(rng, -1.0, 1.0);
        for (Eigen::Index k = 0; k < t.size(); ++k) t(k) = uniform_real(rng, -0.7, 0.7);
        for (Eigen::Index k = 0; k < mask.size(); ++k) mask(k) = uniform_real(rng, 0.0, 1.0) < 0.5 ? 0.0 : 2.0;
        const ForwardMode mode = FixedMaskMode{mask};
        const double lambda = 1e-4;
        const Gradients g = backward(p, forward(p, x, mode).cache, t, lambda);
        auto f = [&] { return loss(forward(p, x, mode).output, t, p, lambda).total; };
        auto probe = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = f();
            param = saved - h;
            const double down = f();
            param = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            worst = std::max(worst, std::abs(analytic - numeric) / scale);
        };
        for (std::size_t i = 0; i < p.layer_count(); ++i) {
            for (Eigen::Index k = 0; k < p.weights[i].size(); ++k) probe(p.weights[i](k), g.weights[i](k));
            for (Eigen::Index k = 0; k < p.biases[i].size(); ++k) probe(p.biases[i](k), g.biases[i](k));
        }
    }
    return {worst < 1e-5, std::to_string(nets.size()) + " nets, max relative error " + fmt(worst)};
}

// ---------------------------------------------------------------- 2

Outcome gain_statistics() {
    Rng rng(202);
    const int n = 64, trials = 100000;
    const Beamformer v{Eigen::VectorXcd::Ones(1), 1.0};
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < trials; ++k) {
        const auto ch = sample_realization(n, 1, FadingModel::rayleigh(), 1.0, rng);
        const double a = std::abs(effective_channel(ch, cophase(ch, v), v).gain);
        sum += a;
        sum2 += a * a;
    }
    const double mean = sum / trials;
    const double var = (sum2 - trials * mean * mean) / (trials - 1);
    const double want_mean = 16.0 * std::numbers::pi;
    const double want_var = 64.0 * (1.0 - std::numbers::pi * std::numbers::pi / 16.0);
    const double em = std::abs(mean / want_mean - 1.0), ev = std::abs(var / want_var - 1.0);
    return {em < 0.01 && ev < 0.05, "mean " + fmt(mean) + " (" + fmt(100 * em) + "% off), variance " + fmt(var) +
                                        " (" + fmt(100 * ev) + "% off)"};
}

// ---------------------------------------------------------------- 3

Outcome ml_oracle() {
    Scenario sc;
    sc.label = "unit";
    sc.link.elements = 1;
    sc.link.antennas = 1;
    sc.link.identity_channel = true;
    sc.snr_grid_db = {6, 8, 10};
    auto det = make_ml_detector();
    const BerCurve c = measure_ber(*det, sc, StopRule{10'000'000, 0, 10'000'000}, 303);
    bool ok = true;
    std::string detail;
    for (const auto& p : c.points) {
        const double q = q_function(std::sqrt(std::pow(10.0, p.snr_db / 10.0)));
        const double rel = std::abs(p.ber / q - 1.0);
        ok = ok && rel < 0.1 && p.bits >= 10'000'000;
        detail += fmt(p.snr_db) + " dB: " + fmt(p.ber) + " vs " + fmt(q) + " (" + fmt(100 * rel) + "%); ";
    }
    return {ok, detail};
}

// ---------------------------------------------------------------- 4

Outcome adam_hand_check() {
    MlpParams p;
    p.dims = {1, 1};
    p.weights = {Eigen::MatrixXd::Zero(1, 1)};
    p.biases = {Eigen::VectorXd::Zero(1)};
    AdamState s = AdamState::fresh(p, TrainConfig{}.adam());
    Gradients g{{Eigen::MatrixXd::Constant(1, 1, 1.0)}, {Eigen::VectorXd::Zero(1)}};
    adam_step(p, g, s);
    const double delta = p.weights[0](0, 0);
    const double dev = std::abs(delta - (-0.03162));
    return {dev <= 1e-6, "delta " + fmt(delta) + ", |delta - (-0.03162)| = " + fmt(dev) + " (m " +
                             fmt(s.m_weights[0](0, 0)) + ", v " + fmt(s.v_weights[0](0, 0)) + ")"};
}

// ---------------------------------------------------------------- 5

Outcome complexity() {
    const std::vector<std::uint64_t> nodes{500, 250, 100, 2};
    const auto r = complexity_report(nodes, 1, 1);
    return {r.inference_mults == 150200, "inference count " + std::to_string(r.inference_mults)};
}

// ---------------------------------------------------------------- 6

Outcome training_sanity() {
    SimConfig toy;
    toy.link.elements = 2;
    toy.link.antennas = 1;
    toy.link.frame_len = 2;
    toy.link.identity_channel = true;
    toy.noiseless = true;
    const Dataset d = generate_dataset(toy, 400, 606);
    TrainConfig cfg;
    cfg.hidden = {24, 16, 12};
    cfg.batch_size = 32;
    cfg.max_epochs = 150;
    cfg.seed = 6;
    const TrainResult r = train(d, cfg);
    const double first = r.history.epochs.front().val_loss;
    const double last = r.history.epochs.back().val_loss;
    const bool learn = last < 0.01 * first;

    TrainConfig frozen = cfg;
    frozen.learning_rate = 0.0;
    frozen.patience = 10;
    frozen.max_epochs = 200;
    const TrainResult f = train(d, frozen);
    const bool stop = f.history.stop == StopReason::Patience &&
                      f.history.epochs.size() == static_cast<std::size_t>(f.history.best_epoch + frozen.patience);
    return {learn && stop, "val loss " + fmt(first) + " -> " + fmt(last) + " (" + fmt(100 * last / first) +
                               "%); frozen run stopped by " + to_string(f.history.stop) + " after " +
                               std::to_string(f.history.epochs.size()) + " epochs (best " +
                               std::to_string(f.history.best_epoch) + ", patience " +
                               std::to_string(frozen.patience) + ")"};
}

// ---------------------------------------------------------------- 7, 8

struct DeskRun {
    bool done = false;
    std::string error;
    std::vector<BerCurve> curves;
    TrainHistory history;
    RunConfig cfg;
};

DeskRun& desk_run() {
    static DeskRun run;
    if (run.done) return run;
    run.done = true;
    try {
        run.cfg = resolve_config({}, {{"desk_scale", "1"}, {"learning_rate", "0.0001"}, {"max_epochs", "45"},
                                      {"train_samples", "70000"}, {"seed", "7"}});
        const RunConfig& cfg = run.cfg;
        const Dataset d = generate_dataset(cfg.sim, cfg.train_samples, cfg.seed());
        const TrainResult r = train(d, cfg.train);
        run.history = r.history;
        Checkpoint ck;
        ck.params = r.params;
        ck.norm = r.norm;
        ck.frame_len = cfg.sim.link.frame_len;
        ck.modulation = cfg.sim.link.modulation;
        ck.train_config = cfg.train;

        Scenario matched;
        matched.label = "perfect_csi";
        matched.link = cfg.sim.link;
        matched.snr_grid_db = {10, 15, 20};
        Scenario nakagami = matched;
        nakagami.label = "nakagami_m1_omega2";
        nakagami.link.fading = FadingModel::nakagami(1.0, 2.0);
        nakagami.snr_grid_db = {15};
        nakagami.detectors = {DetectorKind::DeepRIS};
        Scenario wide = matched;
        wide.label = "n_mismatch";
        wide.link.elements = 2 * cfg.sim.link.elements;
        wide.snr_grid_db = {15};
        wide.detectors = {DetectorKind::DeepRIS};
        const std::vector<Scenario> scs{matched, nakagami, wide};
        run.curves = run_scenario_suite(&ck, scs, cfg.stop, cfg.seed());
    } catch (const std::exception& e) {
        run.error = e.what();
    }
    return run;
}

const BerCurve* find_curve(const DeskRun& r, const std::string& scenario, const std::string& detector) {
    for (const auto& c : r.curves) {
        if (c.scenario == scenario && c.detector == detector) return &c;
    }
    return nullptr;
}

Outcome desk_ordering() {
    const DeskRun& r = desk_run();
    if (!r.error.empty()) return {false, "desk run failed: " + r.error};
    const std::vector<std::string> order{"ML", "DeepRIS", "MMSE", "LS"};
    bool ok = true;
    std::ostringstream detail;
    detail << "trained " << r.history.epochs.size() << " epochs (best " << r.history.best_epoch << "); ";
    for (std::size_t s = 0; s < 3; ++s) {
        std::vector<const BerPoint*> pts;
        for (const auto& name : order) pts.push_back(&find_curve(r, "perfect_csi", name)->points[s]);
        detail << fmt(pts[0]->snr_db) << " dB:";
        for (std::size_t i = 0; i < order.size(); ++i) detail << " " << order[i] << "=" << fmt(pts[i]->ber);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const BerPoint& better = *pts[i];
            const BerPoint& worse = *pts[i + 1];
            const bool overlap = better.ber + better.ci95 >= worse.ber - worse.ci95 &&
                                 worse.ber + worse.ci95 >= better.ber - better.ci95;
            if (overlap) {
                if (better.ber > worse.ber) detail << " [tie " << order[i] << "/" << order[i + 1] << "]";
            } else if (better.ber > worse.ber) {
                ok = false;
                detail << " [INVERSION " << order[i] << ">" << order[i + 1] << "]";
            }
        }
        detail << "; ";
    }
    return {ok, detail.str()};
}

Outcome mismatch_robustness() {
    const DeskRun& r = desk_run();
    if (!r.error.empty()) return {false, "desk run failed: " + r.error};
    const double matched = find_curve(r, "perfect_csi", "DeepRIS")->points[1].ber;
    const double nak = find_curve(r, "nakagami_m1_omega2", "DeepRIS")->points[0].ber;
    const double wide = find_curve(r, "n_mismatch", "DeepRIS")->points[0].ber;
    const bool ok = nak <= 3.0 * matched && wide <= 3.0 * matched;
    return {ok, "15 dB DeepRIS BER matched " + fmt(matched) + ", Nakagami(1,2) " + fmt(nak) + " (x" +
                    fmt(nak / matched) + "), 2N " + fmt(wide) + " (x" + fmt(wide / matched) + ")"};
}

// ---------------------------------------------------------------- 9

int run_command(const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("deepris_accept_" + std::to_string(::getpid()));
    const std::string cli = DEEPRIS_CLI_PATH;
    const std::string common =
        " --desk_scale 1 --seed 11 --max_epochs 3 --eval_snr_db 10,20 --min_bits 20000 --max_bits 40000";
    std::vector<std::string> ckpts, csvs;
    for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = root / std::to_string(rep);
        fs::create_directories(dir);
        const std::string data = (dir / "data.bin").string(), ckpt = (dir / "model.ckpt").string();
        const std::string csv = (dir / "ber.csv").string();
        if (run_command(cli + " generate --out " + data + " --size 5000" + common) != 0 ||
            run_command(cli + " train --data " + data + " --checkpoint " + ckpt + common) != 0 ||
            run_command(cli + " eval --checkpoint " + ckpt + " --csv " + csv + common) != 0) {
            fs::remove_all(root);
            return {false, "CLI pipeline failed in repetition " + std::to_string(rep)};
        }
        ckpts.push_back(read_file(ckpt));
        csvs.push_back(read_file(csv));
    }
    fs::remove_all(root);
    const bool same = ckpts[0] == ckpts[1] && csvs[0] == csvs[1];
    return {same, "checkpoint " + std::to_string(ckpts[0].size()) + " bytes " +
                      (ckpts[0] == ckpts[1] ? "identical" : "DIFFERENT") + ", CSV " +
                      std::to_string(csvs[0].size()) + " bytes " + (csvs[0] == csvs[1] ? "identical" : "DIFFERENT")};
}

// ---------------------------------------------------------------- 10

Outcome property_suites() {
    std::vector<std::string> failures;
    const Constellation c = build_constellation(4);

    // Round trip over every bit pattern of 12 bits and random long blocks.
    Rng rng(1010);
    for (int pattern = 0; pattern < (1 << 12); ++pattern) {
        Bits b(12);
        for (int i = 0; i < 12; ++i) b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((pattern >> i) & 1);
        if (demodulate_hard(modulate(b, c), c) != b) {
            failures.push_back("round trip");
            break;
        }
    }
    Bits big(200000);
    for (auto& x : big) x = static_cast<std::uint8_t>(rng() & 1);
    const auto syms = modulate(big, c);
    if (demodulate_hard(syms, c) != big) failures.push_back("round trip (random)");
    double energy = 0.0;
    for (cd s : syms) energy += std::norm(s);
    energy /= static_cast<double>(syms.size());
    if (std::abs(energy - 1.0) > 1e-12) failures.push_back("unit energy " + fmt(energy));

    // Superposition: noiseless transmit is linear in the symbols.
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const auto ch = sample_realization(8, 3, FadingModel::rayleigh(), 1.0, rng);
        const PhaseConfig p = random_phases(8, rng);
        const Beamformer v = mrt_beamformer(ch, p, 1.0);
        Eigen::MatrixXcd x1(1, 6), x2(1, 6);
        for (Eigen::Index k = 0; k < 6; ++k) {
            x1(k) = complex_normal(rng);
            x2(k) = complex_normal(rng);
        }
        const cd a = complex_normal(rng), b = complex_normal(rng);
        const NoiseModel quiet{0.0};
        const auto y1 = transmit(ch, p, std::span(&v, 1), x1, quiet, rng);
        const auto y2 = transmit(ch, p, std::span(&v, 1), x2, quiet, rng);
        const auto y = transmit(ch, p, std::span(&v, 1), (a * x1 + b * x2).eval(), quiet, rng);
        worst = std::max(worst, (y - (a * y1 + b * y2)).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-12) failures.push_back("superposition " + fmt(worst));

    // Co-phasing beats 100 random configurations on each of 1000 realizations.
    int beaten = 0;
    const Beamformer one{Eigen::VectorXcd::Ones(1), 1.0};
    for (int t = 0; t < 1000; ++t) {
        const auto ch = sample_realization(16, 1, FadingModel::rayleigh(), 1.0, rng);
        const double best = std::abs(effective_channel(ch, cophase(ch, one), one).gain);
        for (int k = 0; k < 100; ++k) {
            if (std::abs(effective_channel(ch, random_phases(16, rng), one).gain) > best + 1e-12) ++beaten;
        }
    }
    if (beaten != 0) failures.push_back("co-phasing beaten " + std::to_string(beaten) + " times");

    std::string detail = "round trip, unit energy, superposition (max dev " + fmt(worst) +
                         "), co-phasing over 1000x100 configs";
    for (const auto& f : failures) detail += "; FAILED " + f;
    return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all{
        {1, "gradient correctness", 30, gradient_check},
        {2, "co-phased gain statistics", 60, gain_statistics},
        {3, "ML detector vs Q(sqrt(gamma))", 120, ml_oracle},
        {4, "Adam first-step hand check", 1, adam_hand_check},
        {5, "complexity closed form", 1, complexity},
        {6, "training sanity and early stopping", 120, training_sanity},
        {7, "desk-scale BER ordering", 900, desk_ordering},
        {8, "mismatch robustness", 0, mismatch_robustness},
        {9, "train + eval determinism", 1200, determinism},
        {10, "modem/channel property suites", 60, property_suites},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ") [" << fmt(secs)
                  << " s]: " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
