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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/complex.h>

#include "deepris/baselines.hpp"
#include "deepris/channel.hpp"
#include "deepris/error.hpp"
#include "deepris/eval.hpp"
#include "deepris/modem.hpp"
#include "deepris/training.hpp"

namespace py = pybind11;
using namespace deepris;

namespace {

LinkConfig make_link(int elements, int antennas, int frame_len, const std::string& fading, double m, double omega,
                     bool identity) {
    LinkConfig link;
    link.elements = elements;
    link.antennas = antennas;
    link.frame_len = frame_len;
    if (fading == "nakagami") {
        link.fading = FadingModel::nakagami(m, omega);
    } else if (fading != "rayleigh") {
        throw ConfigError("fading", "must be rayleigh or nakagami, got " + fading);
    }
    link.identity_channel = identity;
    link.validate();
    return link;
}

}  // namespace

PYBIND11_MODULE(_deepris, m) {
    m.doc() = "RIS link simulator and detector benchmark";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    m.def("constellation", [](int order) { return build_constellation(order).points; }, py::arg("order") = 4);
    m.def(
        "modulate",
        [](const std::vector<std::uint8_t>& bits, int order) { return modulate(bits, build_constellation(order)); },
        py::arg("bits"), py::arg("order") = 4);
    m.def(
        "demodulate",
        [](const std::vector<cd>& symbols, int order) { return demodulate_hard(symbols, build_constellation(order)); },
        py::arg("symbols"), py::arg("order") = 4);

    m.def("pathloss", &pathloss, py::arg("distance"));
    m.def("gain_moments", &gain_moments, py::arg("elements"),
          "Mean and variance of the co-phased cascade gain for N elements.");
    m.def(
        "sample_channel",
        [](Eigen::Index rows, Eigen::Index cols, const std::string& fading, double mm, double omega,
           std::uint64_t seed) {
            FadingModel model = fading == "nakagami" ? FadingModel::nakagami(mm, omega) : FadingModel::rayleigh();
            Rng rng = make_stream(seed, {0});
            return sample_channel(rows, cols, model, rng);
        },
        py::arg("rows"), py::arg("cols"), py::arg("fading") = "rayleigh", py::arg("m") = 1.0,
        py::arg("omega") = 1.0, py::arg("seed") = 1);
    m.def(
        "cophase_gain",
        [](const Eigen::MatrixXcd& source_to_ris, const Eigen::VectorXcd& ris_to_dest) {
            ChannelRealization ch;
            ch.source_to_ris = source_to_ris;
            ch.ris_to_dest = ris_to_dest;
            auto [phases, v] = optimize_single_user(ch, 1.0);
            return std::make_pair(phases.angles, effective_channel(ch, phases, v).gain);
        },
        py::arg("source_to_ris"), py::arg("ris_to_dest"),
        "Optimal RIS angles and the resulting effective gain under MRT.");

    py::class_<ComplexityReport>(m, "ComplexityReport")
        .def_readonly("nodes", &ComplexityReport::nodes)
        .def_readonly("iterations", &ComplexityReport::iterations)
        .def_readonly("samples", &ComplexityReport::samples)
        .def_readonly("inference_mults", &ComplexityReport::inference_mults)
        .def_readonly("training_mults", &ComplexityReport::training_mults);
    m.def(
        "complexity_report",
        [](const std::vector<std::uint64_t>& nodes, std::uint64_t iterations, std::uint64_t samples) {
            return complexity_report(nodes, iterations, samples);
        },
        py::arg("nodes"), py::arg("iterations"), py::arg("samples"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("inputs", &Dataset::inputs)
        .def_readonly("targets", &Dataset::targets)
        .def_property_readonly("size", &Dataset::size)
        .def_property_readonly("features", &Dataset::features);
    m.def(
        "generate_dataset",
        [](std::size_t frames, std::uint64_t seed, int elements, int antennas, int frame_len, double snr_min_db,
           double snr_max_db, bool noiseless, bool identity) {
            SimConfig sim;
            sim.link = make_link(elements, antennas, frame_len, "rayleigh", 1.0, 1.0, identity);
            sim.snr_min_db = snr_min_db;
            sim.snr_max_db = snr_max_db;
            sim.noiseless = noiseless;
            return generate_dataset(sim, frames, seed);
        },
        py::arg("frames"), py::arg("seed") = 1, py::arg("elements") = 64, py::arg("antennas") = 32,
        py::arg("frame_len") = 16, py::arg("snr_min_db") = 0.0, py::arg("snr_max_db") = 30.0,
        py::arg("noiseless") = false, py::arg("identity_channel") = false);
    m.def("save_dataset", [](const std::string& path, const Dataset& d) { save_dataset(path, d); });
    m.def("load_dataset", [](const std::string& path) { return load_dataset(path); });

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("lambda_", &TrainConfig::lambda)
        .def_readwrite("dropout", &TrainConfig::dropout)
        .def_readwrite("val_fraction", &TrainConfig::val_fraction)
        .def_readwrite("patience", &TrainConfig::patience)
        .def_readwrite("tolerance", &TrainConfig::tolerance)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("hidden", &TrainConfig::hidden);

    py::class_<EpochRecord>(m, "EpochRecord")
        .def_readonly("epoch", &EpochRecord::epoch)
        .def_readonly("train_loss", &EpochRecord::train_loss)
        .def_readonly("val_loss", &EpochRecord::val_loss);
    py::class_<TrainHistory>(m, "TrainHistory")
        .def_readonly("epochs", &TrainHistory::epochs)
        .def_readonly("best_epoch", &TrainHistory::best_epoch)
        .def_readonly("best_val_loss", &TrainHistory::best_val_loss)
        .def_property_readonly("stop", [](const TrainHistory& h) { return std::string(to_string(h.stop)); });

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_readonly("frame_len", &Checkpoint::frame_len)
        .def_readonly("modulation", &Checkpoint::modulation)
        .def_readonly("config_text", &Checkpoint::config_text)
        .def("predict", [](const Checkpoint& c, const Eigen::VectorXd& x) {
            return predict(c.params, c.norm.apply(x));
        });

    m.def(
        "train",
        [](const Dataset& d, const TrainConfig& cfg) {
            TrainResult r;
            {
                py::gil_scoped_release release;
                r = train(d, cfg);
            }
            Checkpoint c;
            c.params = std::move(r.params);
            c.norm = std::move(r.norm);
            c.modulation = d.config.link.modulation;
            c.frame_len = d.config.link.frame_len;
            c.train_config = cfg;
            return std::make_pair(std::move(c), std::move(r.history));
        },
        py::arg("dataset"), py::arg("config") = TrainConfig{}, "Returns (checkpoint, history).");
    m.def("save_checkpoint", [](const std::string& path, const Checkpoint& c) { save_checkpoint(path, c); });
    m.def("load_checkpoint", [](const std::string& path) { return load_checkpoint(path); });

    py::class_<BerPoint>(m, "BerPoint")
        .def_readonly("snr_db", &BerPoint::snr_db)
        .def_readonly("errors", &BerPoint::errors)
        .def_readonly("bits", &BerPoint::bits)
        .def_readonly("ber", &BerPoint::ber)
        .def_readonly("ci95", &BerPoint::ci95);
    m.def(
        "measure_ber",
        [](const std::string& detector, const std::vector<double>& snr_db, int elements, int antennas, int frame_len,
           double rho, const std::string& fading, double mm, double omega, std::uint64_t min_bits,
           std::uint64_t min_errors, std::uint64_t max_bits, std::uint64_t seed, const Checkpoint* checkpoint) {
            Scenario sc;
            sc.label = "py";
            sc.link = make_link(elements, antennas, frame_len, fading, mm, omega, false);
            sc.csi = rho == 0.0 ? CsiQuality::perfect() : CsiQuality::imperfect(rho);
            sc.snr_grid_db = snr_db;
            const DetectorKind kind = detector_from_string(detector);
            sc.detectors = {kind};
            sc.validate();
            std::unique_ptr<Detector> det;
            switch (kind) {
                case DetectorKind::DeepRIS:
                    if (checkpoint == nullptr) throw ConfigError("checkpoint", "DeepRIS needs a checkpoint");
                    det = make_neural_detector(*checkpoint);
                    break;
                case DetectorKind::LS: det = make_ls_detector(); break;
                case DetectorKind::MMSE: det = make_mmse_detector(); break;
                case DetectorKind::ML: det = make_ml_detector(); break;
                case DetectorKind::Genie: det = make_genie_detector(); break;
                case DetectorKind::CoinFlip: det = make_coin_flip_detector(); break;
            }
            py::gil_scoped_release release;
            return measure_ber(*det, sc, StopRule{min_bits, min_errors, max_bits}, seed).points;
        },
        py::arg("detector"), py::arg("snr_db"), py::arg("elements") = 64, py::arg("antennas") = 32,
        py::arg("frame_len") = 16, py::arg("rho") = 0.0, py::arg("fading") = "rayleigh", py::arg("m") = 1.0,
        py::arg("omega") = 1.0, py::arg("min_bits") = 100'000, py::arg("min_errors") = 100,
        py::arg("max_bits") = 10'000'000, py::arg("seed") = 1, py::arg("checkpoint") = nullptr);
}
