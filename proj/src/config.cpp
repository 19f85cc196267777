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

#include "deepris/config.hpp"

#include <sstream>

#include "deepris/error.hpp"
#include "deepris/io.hpp"

namespace deepris {

namespace {

bool is_sim_key(const std::string& k) {
    static const char* keys[] = {"N",        "M",          "frame_len",        "modulation", "fading",
                                 "nakagami_m", "nakagami_omega", "p_max", "unit_pathloss", "distance",
                                 "identity_channel", "snr_min_db", "snr_max_db", "noiseless"};
    for (const char* s : keys) {
        if (k == s) return true;
    }
    return false;
}

bool is_train_key(const std::string& k) {
    static const char* keys[] = {"batch_size", "max_epochs", "learning_rate", "lambda", "dropout",
                                 "val_fraction", "patience", "tolerance", "seed", "beta1",
                                 "beta2", "epsilon", "adam_bias_correction", "hidden"};
    for (const char* s : keys) {
        if (k == s) return true;
    }
    return false;
}

void apply_desk_preset(RunConfig& cfg) {
    cfg.sim.link.elements = 16;
    cfg.sim.link.antennas = 4;
    cfg.sim.link.frame_len = 16;
    cfg.train_samples = 30'000;
}

}  // namespace

void RunConfig::validate() const {
    sim.validate();
    train.validate();
    if (train_samples < 1) throw ConfigError("train_samples", "must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho", "must lie in [0, 1]");
    if (eval_snr_db.empty()) throw ConfigError("eval_snr_db", "must list at least one SNR");
    for (std::size_t i = 1; i < eval_snr_db.size(); ++i) {
        if (!(eval_snr_db[i] > eval_snr_db[i - 1])) throw ConfigError("eval_snr_db", "must be strictly increasing");
    }
    if (stop.max_bits == 0) throw ConfigError("max_bits", "must be positive");
}

kv::Entries RunConfig::to_entries() const {
    kv::Entries e = sim.to_entries();
    for (auto& kvp : train.to_entries()) e.push_back(std::move(kvp));
    e.emplace_back("train_samples", std::to_string(train_samples));
    e.emplace_back("rho", kv::format_double(rho));
    e.emplace_back("desk_scale", desk_scale ? "1" : "0");
    e.emplace_back("eval_snr_db", kv::format_list(eval_snr_db));
    e.emplace_back("min_bits", std::to_string(stop.min_bits));
    e.emplace_back("min_errors", std::to_string(stop.min_errors));
    e.emplace_back("max_bits", std::to_string(stop.max_bits));
    return e;
}

std::string RunConfig::text() const { return kv::format(to_entries()); }

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (is_sim_key(key)) {
        kv::Entries e = cfg.sim.to_entries();
        e.emplace_back(key, value);
        cfg.sim = SimConfig::from_entries(e);
    } else if (is_train_key(key)) {
        kv::Entries e = cfg.train.to_entries();
        e.emplace_back(key, value);
        cfg.train = TrainConfig::from_entries(e);
    } else if (key == "train_samples") {
        cfg.train_samples = static_cast<std::size_t>(kv::to_uint(key, value));
    } else if (key == "rho") {
        cfg.rho = kv::to_double(key, value);
    } else if (key == "desk_scale") {
        cfg.desk_scale = kv::to_bool(key, value);
    } else if (key == "eval_snr_db") {
        cfg.eval_snr_db = kv::to_double_list(key, value);
    } else if (key == "min_bits") {
        cfg.stop.min_bits = kv::to_uint(key, value);
    } else if (key == "min_errors") {
        cfg.stop.min_errors = kv::to_uint(key, value);
    } else if (key == "max_bits") {
        cfg.stop.max_bits = kv::to_uint(key, value);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

RunConfig resolve_config(const kv::Entries& file_entries, const kv::Entries& flag_entries, const char* env_seed) {
    RunConfig cfg;
    if (env_seed != nullptr && *env_seed != '\0') {
        try {
            cfg.train.seed = kv::to_uint("DEEPRIS_SEED", env_seed);
        } catch (const ConfigError&) {
            throw ConfigError("DEEPRIS_SEED", std::string("expected a non-negative integer, got '") + env_seed + "'");
        }
    }
    bool desk = false;
    for (const auto* entries : {&file_entries, &flag_entries}) {
        for (const auto& [k, v] : *entries) {
            if (k == "desk_scale") desk = kv::to_bool(k, v);
        }
    }
    if (desk) apply_desk_preset(cfg);
    for (const auto* entries : {&file_entries, &flag_entries}) {
        for (const auto& [k, v] : *entries) apply_setting(cfg, k, v);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& path, const kv::Entries& flag_entries,
                       const char* env_seed) {
    kv::Entries file_entries;
    if (path) file_entries = kv::parse(read_file(*path));
    return resolve_config(file_entries, flag_entries, env_seed);
}

std::vector<Scenario> parse_scenarios(const std::string& text, const Scenario& base) {
    std::vector<Scenario> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream words(line);
        std::string label;
        if (!(words >> label)) continue;
        Scenario sc = base;
        sc.label = label;
        std::string tok;
        while (words >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw ConfigError(label, "expected key=value, got '" + tok + "'");
            const std::string k = tok.substr(0, eq);
            const std::string v = tok.substr(eq + 1);
            if (k == "N") sc.link.elements = static_cast<int>(kv::to_int(k, v));
            else if (k == "M") sc.link.antennas = static_cast<int>(kv::to_int(k, v));
            else if (k == "fading") {
                if (v == "rayleigh") sc.link.fading = FadingModel::rayleigh();
                else if (v == "nakagami") sc.link.fading.kind = FadingKind::Nakagami;
                else throw ConfigError(k, "expected rayleigh or nakagami");
            } else if (k == "nakagami_m") sc.link.fading.m = kv::to_double(k, v);
            else if (k == "nakagami_omega") sc.link.fading.omega = kv::to_double(k, v);
            else if (k == "rho") sc.csi = CsiQuality::imperfect(kv::to_double(k, v));
            else if (k == "snr") sc.snr_grid_db = kv::to_double_list(k, v);
            else if (k == "detectors") {
                sc.detectors.clear();
                std::istringstream names(v);
                std::string name;
                while (std::getline(names, name, ',')) sc.detectors.push_back(detector_from_string(name));
            } else {
                throw ConfigError(k, "unknown scenario key in '" + label + "'");
            }
        }
        sc.validate();
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace deepris
