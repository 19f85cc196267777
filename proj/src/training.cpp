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

#include "deepris/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "binary_io.hpp"
#include "deepris/error.hpp"
#include "deepris/io.hpp"

namespace deepris {

namespace {

constexpr std::string_view kCheckpointMagic = "DRISCKPT";
constexpr std::string_view kDatasetMagic = "DRISDATA";
constexpr std::uint32_t kDatasetVersion = 1;

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, std::span<const Eigen::Index> cols) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
    return out;
}

std::uint64_t order_digest(std::span<const Eigen::Index> order) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i : order) {
        h ^= static_cast<std::uint64_t>(i);
        h *= 0x100000001b3ULL;
    }
    return h;
}

double validation_mse(const MlpParams& p, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    constexpr Eigen::Index kChunk = 4096;
    double sum = 0.0;
    for (Eigen::Index start = 0; start < x.cols(); start += kChunk) {
        const Eigen::Index n = std::min(kChunk, x.cols() - start);
        const Eigen::MatrixXd out = forward(p, x.middleCols(start, n), InferMode{}).output;
        sum += (out - y.middleCols(start, n)).squaredNorm();
    }
    return sum / static_cast<double>(x.cols());
}

void append_checksum(detail::ByteWriter& w) { w.u64(kv::digest(w.bytes())); }

// Verifies the trailing checksum and returns the payload it covers.
std::string_view checked_payload(const std::string& bytes, const std::string& what) {
    if (bytes.size() < 8) throw IoError(what + ": file is truncated or corrupted");
    const std::string_view payload(bytes.data(), bytes.size() - 8);
    detail::ByteReader tail(std::string_view(bytes).substr(bytes.size() - 8), what);
    if (tail.u64() != kv::digest(payload)) throw IoError(what + ": checksum mismatch (file corrupted)");
    return payload;
}

}  // namespace

void SimConfig::validate() const {
    link.validate();
    if (!(snr_min_db <= snr_max_db)) throw ConfigError("snr_min_db", "SNR range must satisfy min <= max");
}

kv::Entries SimConfig::to_entries() const {
    kv::Entries e = link.to_entries();
    e.emplace_back("snr_min_db", kv::format_double(snr_min_db));
    e.emplace_back("snr_max_db", kv::format_double(snr_max_db));
    e.emplace_back("noiseless", noiseless ? "1" : "0");
    return e;
}

SimConfig SimConfig::from_entries(const kv::Entries& entries) {
    SimConfig s;
    for (const auto& [k, v] : entries) {
        if (k == "N") s.link.elements = static_cast<int>(kv::to_int(k, v));
        else if (k == "M") s.link.antennas = static_cast<int>(kv::to_int(k, v));
        else if (k == "frame_len") s.link.frame_len = static_cast<int>(kv::to_int(k, v));
        else if (k == "modulation") s.link.modulation = static_cast<int>(kv::to_int(k, v));
        else if (k == "fading") {
            if (v == "rayleigh") s.link.fading.kind = FadingKind::Rayleigh;
            else if (v == "nakagami") s.link.fading.kind = FadingKind::Nakagami;
            else throw ConfigError(k, "expected rayleigh or nakagami, got '" + v + "'");
        } else if (k == "nakagami_m") s.link.fading.m = kv::to_double(k, v);
        else if (k == "nakagami_omega") s.link.fading.omega = kv::to_double(k, v);
        else if (k == "p_max") s.link.p_max = kv::to_double(k, v);
        else if (k == "unit_pathloss") s.link.pathloss.unit = kv::to_bool(k, v);
        else if (k == "distance") s.link.pathloss.distance = kv::to_double(k, v);
        else if (k == "identity_channel") s.link.identity_channel = kv::to_bool(k, v);
        else if (k == "snr_min_db") s.snr_min_db = kv::to_double(k, v);
        else if (k == "snr_max_db") s.snr_max_db = kv::to_double(k, v);
        else if (k == "noiseless") s.noiseless = kv::to_bool(k, v);
        else throw ConfigError(k, "unknown key");
    }
    return s;
}

Eigen::MatrixXd NormStats::apply(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != mean.size()) throw NumericError("normalization: feature count mismatch");
    Eigen::MatrixXd out = inputs;
    out.colwise() -= mean;
    return out;
}

Eigen::VectorXd encode_interleaved(std::span<const cd> samples) {
    Eigen::VectorXd v(2 * static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        v[2 * static_cast<Eigen::Index>(i)] = samples[i].real();
        v[2 * static_cast<Eigen::Index>(i) + 1] = samples[i].imag();
    }
    return v;
}

Eigen::VectorXd encode_interleaved(const Eigen::VectorXcd& samples) {
    return encode_interleaved(std::span<const cd>(samples.data(), static_cast<std::size_t>(samples.size())));
}

Dataset generate_dataset(const SimConfig& sim, std::size_t frames, std::uint64_t seed) {
    sim.validate();
    if (frames == 0) throw ConfigError("train_samples", "dataset size must be >= 1");
    const Constellation c = build_constellation(sim.link.modulation);
    const Eigen::Index features = 2 * sim.link.frame_len;
    Dataset d;
    d.config = sim;
    d.inputs.resize(features, static_cast<Eigen::Index>(frames));
    d.targets.resize(features, static_cast<Eigen::Index>(frames));
    for (std::size_t f = 0; f < frames; ++f) {
        Rng rng = make_stream(seed, {f});
        const double snr_db = uniform_real(rng, sim.snr_min_db, std::nextafter(sim.snr_max_db, INFINITY));
        const double noise = sim.noiseless ? 0.0 : sim.link.noise_variance(snr_db);
        const Frame frame = simulate_frame(sim.link, noise, c, rng);
        const auto col = static_cast<Eigen::Index>(f);
        d.inputs.col(col) = encode_interleaved(frame.received);
        d.targets.col(col) = encode_interleaved(frame.symbols);
    }
    return d;
}

NormStats compute_norm(const Eigen::MatrixXd& inputs) {
    if (inputs.cols() == 0) throw NumericError("normalize: empty dataset");
    return {inputs.rowwise().mean()};
}

std::pair<Dataset, NormStats> normalize(const Dataset& d) {
    NormStats stats = compute_norm(d.inputs);
    Dataset out = d;
    out.inputs = stats.apply(d.inputs);
    return {std::move(out), std::move(stats)};
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs", "must be >= 1");
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate", "must be >= 0");
    if (!(lambda >= 0.0)) throw ConfigError("lambda", "must be >= 0");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout", "must lie in [0, 1)");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction", "must lie in (0, 1)");
    if (patience < 1) throw ConfigError("patience", "must be >= 1");
    if (!(tolerance >= 0.0)) throw ConfigError("tolerance", "must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1", "must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2", "must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be > 0");
    for (int h : hidden) {
        if (h < 1) throw ConfigError("hidden", "layer sizes must be >= 1");
    }
}

AdamConfig TrainConfig::adam() const { return {learning_rate, beta1, beta2, epsilon, bias_correction}; }

kv::Entries TrainConfig::to_entries() const {
    return {
        {"batch_size", std::to_string(batch_size)},
        {"max_epochs", std::to_string(max_epochs)},
        {"learning_rate", kv::format_double(learning_rate)},
        {"lambda", kv::format_double(lambda)},
        {"dropout", kv::format_double(dropout)},
        {"val_fraction", kv::format_double(val_fraction)},
        {"patience", std::to_string(patience)},
        {"tolerance", kv::format_double(tolerance)},
        {"seed", std::to_string(seed)},
        {"beta1", kv::format_double(beta1)},
        {"beta2", kv::format_double(beta2)},
        {"epsilon", kv::format_double(epsilon)},
        {"adam_bias_correction", bias_correction ? "1" : "0"},
        {"hidden", kv::format_list(hidden)},
    };
}

TrainConfig TrainConfig::from_entries(const kv::Entries& entries) {
    TrainConfig c;
    for (const auto& [k, v] : entries) {
        if (k == "batch_size") c.batch_size = static_cast<int>(kv::to_int(k, v));
        else if (k == "max_epochs") c.max_epochs = static_cast<int>(kv::to_int(k, v));
        else if (k == "learning_rate") c.learning_rate = kv::to_double(k, v);
        else if (k == "lambda") c.lambda = kv::to_double(k, v);
        else if (k == "dropout") c.dropout = kv::to_double(k, v);
        else if (k == "val_fraction") c.val_fraction = kv::to_double(k, v);
        else if (k == "patience") c.patience = static_cast<int>(kv::to_int(k, v));
        else if (k == "tolerance") c.tolerance = kv::to_double(k, v);
        else if (k == "seed") c.seed = kv::to_uint(k, v);
        else if (k == "beta1") c.beta1 = kv::to_double(k, v);
        else if (k == "beta2") c.beta2 = kv::to_double(k, v);
        else if (k == "epsilon") c.epsilon = kv::to_double(k, v);
        else if (k == "adam_bias_correction") c.bias_correction = kv::to_bool(k, v);
        else if (k == "hidden") c.hidden = kv::to_int_list(k, v);
        else throw ConfigError(k, "unknown key");
    }
    return c;
}

const char* to_string(StopReason r) { return r == StopReason::Patience ? "patience" : "max_epochs"; }

DataSplit split_indices(Eigen::Index n, double val_fraction, Rng& rng) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
    DataSplit s;
    s.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    s.validation.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
    return s;
}

TrainResult train(const Dataset& d, const TrainConfig& cfg) {
    cfg.validate();
    if (d.inputs.rows() != d.targets.rows() || d.inputs.cols() != d.targets.cols()) {
        throw NumericError("train: inputs and targets differ in shape");
    }
    Rng split_rng = make_stream(cfg.seed, {1});
    Rng init_rng = make_stream(cfg.seed, {2});
    Rng shuffle_rng = make_stream(cfg.seed, {3});
    Rng dropout_rng = make_stream(cfg.seed, {4});

    const DataSplit split = split_indices(d.size(), cfg.val_fraction, split_rng);
    if (split.validation.empty() || split.train.size() < static_cast<std::size_t>(cfg.batch_size)) {
        throw NumericError("train: insufficient data (" + std::to_string(d.size()) +
                           " frames) for one batch of " + std::to_string(cfg.batch_size) +
                           " after the validation split");
    }

    TrainResult result;
    const Eigen::MatrixXd raw_train = gather(d.inputs, split.train);
    result.norm = compute_norm(raw_train);
    const Eigen::MatrixXd x_train = result.norm.apply(raw_train);
    const Eigen::MatrixXd y_train = gather(d.targets, split.train);
    const Eigen::MatrixXd x_val = result.norm.apply(gather(d.inputs, split.validation));
    const Eigen::MatrixXd y_val = gather(d.targets, split.validation);

    std::vector<int> dims;
    dims.push_back(static_cast<int>(d.features()));
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(static_cast<int>(d.targets.rows()));
    const double z = build_constellation(d.config.link.modulation).amplitude_bound;

    MlpParams params = init_mlp(dims, z, init_rng);
    AdamState adam = AdamState::fresh(params, cfg.adam());
    MlpParams best = params;
    double best_loss = std::numeric_limits<double>::infinity();
    int stall = 0;

    TrainHistory& h = result.history;
    std::vector<Eigen::Index> order(split.train.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto n_train = static_cast<Eigen::Index>(order.size());

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double train_sum = 0.0;
        int batches = 0;
        for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
            const Eigen::Index n = std::min<Eigen::Index>(cfg.batch_size, n_train - start);
            const std::span<const Eigen::Index> rows(order.data() + start, static_cast<std::size_t>(n));
            const Eigen::MatrixXd xb = gather(x_train, rows);
            const Eigen::MatrixXd yb = gather(y_train, rows);
            const ForwardMode mode =
                cfg.dropout > 0.0 ? ForwardMode{TrainMode{cfg.dropout, &dropout_rng}} : ForwardMode{InferMode{}};
            const ForwardResult fr = forward(params, xb, mode);
            train_sum += loss(fr.output, yb, params, cfg.lambda).mse_part;
            const Gradients g = backward(params, fr.cache, yb, cfg.lambda);
            adam_step(params, g, adam);
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = train_sum / batches;
        rec.val_loss = validation_mse(params, x_val, y_val);
        rec.learning_rate = cfg.learning_rate;
        rec.shuffle_digest = order_digest(order);
        h.epochs.push_back(rec);

        if (rec.val_loss < best_loss - cfg.tolerance) {
            best_loss = rec.val_loss;
            best = params;
            h.best_epoch = epoch;
            stall = 0;
        } else if (++stall >= cfg.patience) {
            h.stop = StopReason::Patience;
            break;
        }
    }
    h.best_val_loss = best_loss;
    result.params = std::move(best);
    result.split = split;
    return result;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    const MlpParams& p = c.params;
    detail::ByteWriter w;
    w.raw(kCheckpointMagic);
    w.u32(Checkpoint::kFormatVersion);
    w.u32(static_cast<std::uint32_t>(p.dims.size()));
    for (int d : p.dims) w.u32(static_cast<std::uint32_t>(d));
    w.u32(p.hidden == Activation::Tanh ? 0 : 1);
    w.f64(p.output_scale);
    for (std::size_t i = 0; i < p.layer_count(); ++i) {
        w.matrix(p.weights[i]);
        w.vector(p.biases[i]);
    }
    w.u32(static_cast<std::uint32_t>(c.norm.mean.size()));
    w.vector(c.norm.mean);
    w.u32(static_cast<std::uint32_t>(c.frame_len));
    w.u32(static_cast<std::uint32_t>(c.modulation));
    w.u64(c.config_digest());
    w.text(kv::format(c.train_config.to_entries()));
    w.text(c.config_text);
    append_checksum(w);
    write_file_atomic(path, w.bytes());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string what = "checkpoint '" + path.string() + "'";
    const std::string bytes = read_file(path);
    if (bytes.size() < kCheckpointMagic.size() || std::string_view(bytes).substr(0, 8) != kCheckpointMagic) {
        throw IoError(what + ": not a checkpoint file");
    }
    detail::ByteReader r(checked_payload(bytes, what), what);
    r.raw(kCheckpointMagic.size());
    const auto version = r.u32();
    if (version != Checkpoint::kFormatVersion) {
        throw IoError(what + ": format version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(Checkpoint::kFormatVersion) + ")");
    }
    Checkpoint c;
    const auto n_dims = r.u32();
    if (n_dims < 2 || n_dims > 64) throw IoError(what + ": implausible layer count");
    for (std::uint32_t i = 0; i < n_dims; ++i) {
        const auto d = r.u32();
        if (d == 0 || d > (1u << 24)) throw IoError(what + ": implausible layer size");
        c.params.dims.push_back(static_cast<int>(d));
    }
    const auto act = r.u32();
    if (act > 1) throw IoError(what + ": unknown activation code");
    c.params.hidden = act == 0 ? Activation::Tanh : Activation::Relu;
    c.params.output_scale = r.f64();
    for (std::size_t i = 0; i + 1 < c.params.dims.size(); ++i) {
        c.params.weights.push_back(r.matrix(c.params.dims[i + 1], c.params.dims[i]));
        c.params.biases.push_back(r.vector(c.params.dims[i + 1]));
    }
    const auto n_mean = r.u32();
    if (static_cast<int>(n_mean) != c.params.dims.front()) throw IoError(what + ": normalization length mismatch");
    c.norm.mean = r.vector(n_mean);
    c.frame_len = static_cast<int>(r.u32());
    c.modulation = static_cast<int>(r.u32());
    const auto digest = r.u64();
    try {
        c.train_config = TrainConfig::from_entries(kv::parse(r.text()));
    } catch (const ConfigError& e) {
        throw IoError(what + ": bad training config block (" + e.what() + ")");
    }
    c.config_text = r.text();
    if (r.remaining() != 0) throw IoError(what + ": trailing bytes (corrupted length)");
    if (digest != c.config_digest()) throw IoError(what + ": config digest mismatch");
    if (2 * c.frame_len != c.params.dims.front()) throw IoError(what + ": frame length does not match input layer");
    return c;
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
    detail::ByteWriter w;
    w.raw(kDatasetMagic);
    w.u32(kDatasetVersion);
    w.u32(static_cast<std::uint32_t>(d.inputs.rows()));
    w.u64(static_cast<std::uint64_t>(d.inputs.cols()));
    // Sample-major: each frame's features are contiguous.
    w.matrix(d.inputs.transpose());
    w.matrix(d.targets.transpose());
    w.text(kv::format(d.config.to_entries()));
    append_checksum(w);
    write_file_atomic(path, w.bytes());
}

Dataset load_dataset(const std::filesystem::path& path) {
    const std::string what = "dataset '" + path.string() + "'";
    const std::string bytes = read_file(path);
    if (bytes.size() < kDatasetMagic.size() || std::string_view(bytes).substr(0, 8) != kDatasetMagic) {
        throw IoError(what + ": not a dataset file");
    }
    detail::ByteReader r(checked_payload(bytes, what), what);
    r.raw(kDatasetMagic.size());
    if (const auto v = r.u32(); v != kDatasetVersion) {
        throw IoError(what + ": format version " + std::to_string(v) + " is not supported");
    }
    const auto rows = static_cast<Eigen::Index>(r.u32());
    const auto cols = static_cast<Eigen::Index>(r.u64());
    if (rows <= 0 || static_cast<std::size_t>(rows * cols) * 16 > r.remaining()) {
        throw IoError(what + ": file is truncated or corrupted");
    }
    Dataset d;
    d.inputs = r.matrix(cols, rows).transpose();
    d.targets = r.matrix(cols, rows).transpose();
    try {
        d.config = SimConfig::from_entries(kv::parse(r.text()));
    } catch (const ConfigError& e) {
        throw IoError(what + ": bad generation config block (" + e.what() + ")");
    }
    if (r.remaining() != 0) throw IoError(what + ": trailing bytes (corrupted length)");
    return d;
}

}  // namespace deepris
