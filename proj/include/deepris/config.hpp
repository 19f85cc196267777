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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "deepris/eval.hpp"
#include "deepris/kv.hpp"
#include "deepris/training.hpp"

namespace deepris {

/// Fully resolved run parameters. Defaults reproduce the full-size setup
/// (M = 32, N = 64, 4-QAM, 0-30 dB training SNR, batch 64, 7e4 frames, 20%
/// validation, patience 50, lr 0.01, Adam 0.9/0.999, lambda 1e-4, dropout 0.5).
struct RunConfig {
    SimConfig sim;
    TrainConfig train;
    std::size_t train_samples = 70'000;
    double rho = 0.1;
    bool desk_scale = false;
    std::vector<double> eval_snr_db{0, 5, 10, 15, 20, 25, 30};
    StopRule stop;

    std::uint64_t seed() const { return train.seed; }

    void validate() const;
    kv::Entries to_entries() const;
    /// Canonical `key=value` dump; its FNV-1a digest identifies the run.
    std::string text() const;
    std::uint64_t digest() const { return kv::digest(text()); }
};

/// Sets one key. Throws ConfigError naming the key if it is unknown or malformed.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Resolution order: built-in defaults, DEEPRIS_SEED (if `env_seed` is set),
/// the desk-scale preset (N = 16, M = 4, 3e4 frames) when desk_scale is on,
/// config file entries, then flag entries. The result is validated.
RunConfig resolve_config(const kv::Entries& file_entries, const kv::Entries& flag_entries,
                         const char* env_seed = nullptr);

/// Reads `path` (if given) as a flat key-value file and resolves it with the flags.
RunConfig parse_config(const std::optional<std::filesystem::path>& path, const kv::Entries& flag_entries,
                       const char* env_seed = nullptr);

/// One scenario per line: `label key=value ...`. Keys: N, M, fading,
/// nakagami_m, nakagami_omega, rho, snr (comma list), detectors (comma list).
/// Unspecified fields come from `base`.
std::vector<Scenario> parse_scenarios(const std::string& text, const Scenario& base);

}  // namespace deepris
