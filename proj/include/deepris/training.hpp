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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deepris/kv.hpp"
#include "deepris/link.hpp"
#include "deepris/neural.hpp"

namespace deepris {

/// Generation settings for training data: the link plus the SNR range each
/// frame's noise level is drawn from (uniform in dB).
struct SimConfig {
    LinkConfig link;
    double snr_min_db = 0.0;
    double snr_max_db = 30.0;
    bool noiseless = false;

    void validate() const;
    kv::Entries to_entries() const;
    static SimConfig from_entries(const kv::Entries& e);
};

/// Column s of `inputs` holds frame s's received samples as interleaved
/// (Re, Im) pairs; the matching column of `targets` holds the transmitted symbols.
struct Dataset {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd targets;
    SimConfig config;

    Eigen::Index size() const { return inputs.cols(); }
    Eigen::Index features() const { return inputs.rows(); }
};

/// Per-feature means subtracted from every input before it reaches the network.
struct NormStats {
    Eigen::VectorXd mean;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& inputs) const;
};

Eigen::VectorXd encode_interleaved(const Eigen::VectorXcd& samples);
Eigen::VectorXd encode_interleaved(std::span<const cd> samples);

/// Frame f uses the RNG stream (seed, f), so the result does not depend on
/// how generation is scheduled.
Dataset generate_dataset(const SimConfig& sim, std::size_t frames, std::uint64_t seed);

/// Zero-centres the inputs with their own per-feature means.
std::pair<Dataset, NormStats> normalize(const Dataset& d);
NormStats compute_norm(const Eigen::MatrixXd& inputs);

struct TrainConfig {
    int batch_size = 64;
    int max_epochs = 1000;
    double learning_rate = 0.01;
    double lambda = 1e-4;
    double dropout = 0.5;
    double val_fraction = 0.2;
    int patience = 50;
    double tolerance = 1e-5;
    std::uint64_t seed = 1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    bool bias_correction = false;
    std::vector<int> hidden{500, 250, 100};

    void validate() const;
    AdamConfig adam() const;
    kv::Entries to_entries() const;
    static TrainConfig from_entries(const kv::Entries& e);
};

enum class StopReason { Patience, MaxEpochs };

const char* to_string(StopReason r);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;  // mean data (MSE) loss over the epoch's mini-batches
    double val_loss = 0.0;    // MSE on the validation split, dropout off
    double learning_rate = 0.0;
    std::uint64_t shuffle_digest = 0;  // fingerprint of this epoch's row order
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    StopReason stop = StopReason::MaxEpochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

struct DataSplit {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> validation;
};

/// Seeded shuffle, then the trailing `val_fraction` of rows become validation.
DataSplit split_indices(Eigen::Index n, double val_fraction, Rng& rng);

struct TrainResult {
    MlpParams params;
    NormStats norm;
    TrainHistory history;
    DataSplit split;
};

/// Mini-batch Adam on the data term plus L2 penalty, one validation pass per
/// epoch, early stopping after `patience` epochs without an improvement larger
/// than `tolerance`. Returns the parameters from the best validation epoch.
TrainResult train(const Dataset& d, const TrainConfig& cfg);

struct Checkpoint {
    static constexpr std::uint32_t kFormatVersion = 1;

    MlpParams params;
    NormStats norm;
    int modulation = 4;
    int frame_len = 1;
    TrainConfig train_config;
    /// Resolved run configuration the model was produced under.
    std::string config_text;

    std::uint64_t config_digest() const { return kv::digest(config_text); }
};

/// Writes to a temporary sibling then renames. Throws IoError.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);

/// Throws IoError on unreadable, truncated, corrupted, or version-mismatched files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

void save_dataset(const std::filesystem::path& path, const Dataset& d);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace deepris
