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

#include "deepris/cli.hpp"

#include <filesystem>
#include <ostream>

#include "deepris/error.hpp"
#include "deepris/io.hpp"

namespace deepris {

namespace {

std::vector<std::string> provenance(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> lines;
    lines.push_back("deepris " + command);
    lines.push_back("config_digest=" + kv::hex(cfg.digest()));
    lines.push_back("seed=" + std::to_string(cfg.seed()));
    for (const auto& [k, v] : cfg.to_entries()) lines.push_back(k + "=" + v);
    return lines;
}

void append_comments(std::string& s, std::span<const std::string> comments) {
    for (const auto& c : comments) {
        s += "# ";
        s += c;
        s += '\n';
    }
}

void require_file(const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p)) throw IoError(std::string(what) + " not found: '" + p.string() + "'");
}

// Training link of a checkpoint, recovered from its recorded run config.
LinkConfig trained_link(const Checkpoint& ckpt, const RunConfig& fallback) {
    if (ckpt.config_text.empty()) return fallback.sim.link;
    try {
        return resolve_config(kv::parse(ckpt.config_text), {}).sim.link;
    } catch (const ConfigError& e) {
        throw IoError(std::string("checkpoint run config is unreadable: ") + e.what());
    }
}

int run(const GenerateCommand& c, const RunConfig& cfg, std::ostream& out) {
    const std::size_t frames = c.size.value_or(cfg.train_samples);
    const Dataset d = generate_dataset(cfg.sim, frames, cfg.seed());
    save_dataset(c.out, d);
    out << "wrote " << d.size() << " frames (" << d.features() << " features) to " << c.out.string() << "\n";
    return kExitOk;
}

int run(const TrainCommand& c, const RunConfig& cfg, std::ostream& out) {
    require_file(c.data, "dataset");
    const Dataset d = load_dataset(c.data);
    const TrainResult r = train(d, cfg.train);
    Checkpoint ckpt;
    ckpt.params = r.params;
    ckpt.norm = r.norm;
    ckpt.modulation = d.config.link.modulation;
    ckpt.frame_len = d.config.link.frame_len;
    ckpt.train_config = cfg.train;
    // Record the link the data was generated under, with this run's training settings.
    RunConfig recorded = cfg;
    recorded.sim = d.config;
    ckpt.config_text = recorded.text();
    save_checkpoint(c.checkpoint, ckpt);
    if (c.history_csv) {
        const LearningRateRun run{cfg.train.learning_rate, r.history, is_unstable(r.history)};
        auto comments = provenance(cfg, "train");
        comments.push_back(std::string("stop_reason=") + to_string(r.history.stop));
        comments.push_back("best_epoch=" + std::to_string(r.history.best_epoch));
        write_file_atomic(*c.history_csv, format_history_csv(std::span(&run, 1), comments));
    }
    out << "trained " << r.history.epochs.size() << " epochs, best epoch " << r.history.best_epoch
        << " (validation loss " << kv::format_double(r.history.best_val_loss) << "), stop: "
        << to_string(r.history.stop) << "\n";
    out << "wrote checkpoint " << c.checkpoint.string() << "\n";
    return kExitOk;
}

int run(const EvalCommand& c, const RunConfig& cfg, std::ostream& out) {
    require_file(c.checkpoint, "checkpoint");
    const Checkpoint ckpt = load_checkpoint(c.checkpoint);
    const LinkConfig link = trained_link(ckpt, cfg);
    std::vector<Scenario> scenarios;
    if (c.scenario_file) {
        require_file(*c.scenario_file, "scenario file");
        Scenario base;
        base.link = link;
        base.snr_grid_db = cfg.eval_snr_db;
        scenarios = parse_scenarios(read_file(*c.scenario_file), base);
    } else {
        scenarios = default_scenarios(link, cfg.eval_snr_db, cfg.rho);
    }
    const auto curves = run_scenario_suite(&ckpt, scenarios, cfg.stop, cfg.seed());
    auto comments = provenance(cfg, "eval");
    comments.push_back("checkpoint_config_digest=" + kv::hex(ckpt.config_digest()));
    write_csv(curves, c.csv, comments);
    out << "wrote " << curves.size() << " BER curves to " << c.csv.string() << "\n";
    return kExitOk;
}

int run(const SweepCommand& c, const RunConfig& cfg, std::ostream& out) {
    require_file(c.data, "dataset");
    if (c.rates.empty()) throw ConfigError("rates", "at least one learning rate is required");
    const Dataset d = load_dataset(c.data);
    const auto runs = learning_rate_study(d, c.rates, cfg.train);
    auto comments = provenance(cfg, "sweep");
    for (const auto& r : runs) {
        const std::string tag = "[" + kv::format_double(r.learning_rate) + "]=";
        comments.push_back("stop_reason" + tag + to_string(r.history.stop));
        comments.push_back("unstable" + tag + (r.unstable ? "1" : "0"));
    }
    write_file_atomic(c.csv, format_history_csv(runs, comments));
    out << "wrote " << runs.size() << " training histories to " << c.csv.string() << "\n";
    return kExitOk;
}

int run(const ComplexityCommand& c, const RunConfig&, std::ostream& out) {
    const ComplexityReport r = complexity_report(c.nodes, c.iterations, c.samples);
    out << "inference_mults=" << r.inference_mults << "\n";
    out << "training_mults=" << r.training_mults << "\n";
    return kExitOk;
}

}  // namespace

std::string format_ber_csv(std::span<const BerCurve> curves, std::span<const std::string> comments) {
    std::string s;
    append_comments(s, comments);
    s += "scenario,detector,snr_db,bits,errors,ber,ci95,seed\n";
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            s += c.scenario + ',' + c.detector + ',' + kv::format_double(p.snr_db) + ',' + std::to_string(p.bits) +
                 ',' + std::to_string(p.errors) + ',' + kv::format_double(p.ber) + ',' +
                 kv::format_double(p.ci95) + ',' + std::to_string(c.seed) + '\n';
        }
    }
    return s;
}

void write_csv(std::span<const BerCurve> curves, const std::filesystem::path& path,
               std::span<const std::string> comments) {
    write_file_atomic(path, format_ber_csv(curves, comments));
}

std::string format_history_csv(std::span<const LearningRateRun> runs, std::span<const std::string> comments) {
    std::string s;
    append_comments(s, comments);
    s += "learning_rate,epoch,train_loss,val_loss\n";
    for (const auto& r : runs) {
        for (const auto& e : r.history.epochs) {
            s += kv::format_double(r.learning_rate) + ',' + std::to_string(e.epoch) + ',' +
                 kv::format_double(e.train_loss) + ',' + kv::format_double(e.val_loss) + '\n';
        }
    }
    return s;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitIo;
    return kExitNumeric;
}

int dispatch(const CliCommand& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        for (const auto& line : provenance(cfg, "run")) out << "# " << line << "\n";
        return std::visit([&](const auto& c) { return run(c, cfg, out); }, cmd);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

kv::Entries parse_flag_overrides(std::span<const std::string> args) {
    kv::Entries out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0 || a.size() <= 2) throw ConfigError(a, "expected --key value");
        std::string key = a.substr(2);
        std::string value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= args.size()) throw ConfigError(key, "missing value");
            value = args[++i];
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

}  // namespace deepris
