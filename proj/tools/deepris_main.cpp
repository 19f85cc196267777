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

// Command-line front end: generate / train / eval / sweep / complexity.
//
// Every subcommand accepts `--config FILE` plus arbitrary `--key value`
// overrides of run configuration keys (see README).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deepris/cli.hpp"
#include "deepris/error.hpp"

namespace {

struct Common {
    std::string config_path;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "Flat key = value configuration file");
    sub->allow_extras();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DeepRIS link simulator and detector benchmark"};
    app.require_subcommand(1);

    Common common;
    deepris::GenerateCommand gen;
    std::size_t gen_size = 0;
    auto* g = app.add_subcommand("generate", "Simulate a training dataset");
    add_common(g, common);
    g->add_option("--out", gen.out, "Output dataset file")->required();
    auto* size_opt = g->add_option("--size", gen_size, "Number of frames (default: train_samples)");

    deepris::TrainCommand tr;
    std::string history;
    auto* t = app.add_subcommand("train", "Train the neural detector");
    add_common(t, common);
    t->add_option("--data", tr.data, "Dataset file")->required();
    t->add_option("--checkpoint", tr.checkpoint, "Checkpoint output path")->required();
    t->add_option("--history", history, "Optional per-epoch loss CSV");

    deepris::EvalCommand ev;
    std::string scenarios;
    auto* e = app.add_subcommand("eval", "Measure BER curves for all detectors");
    add_common(e, common);
    e->add_option("--checkpoint", ev.checkpoint, "Trained checkpoint")->required();
    e->add_option("--scenarios", scenarios, "Scenario file (default: built-in suite)");
    e->add_option("--csv", ev.csv, "BER CSV output path")->required();

    deepris::SweepCommand sw;
    auto* s = app.add_subcommand("sweep", "Learning-rate study");
    add_common(s, common);
    s->add_option("--data", sw.data, "Dataset file")->required();
    s->add_option("--rates", sw.rates, "Learning rates")->delimiter(',')->required();
    s->add_option("--csv", sw.csv, "History CSV output path")->required();

    deepris::ComplexityCommand cx;
    auto* c = app.add_subcommand("complexity", "Multiply counts of the dense layers");
    add_common(c, common);
    c->add_option("--dims", cx.nodes, "Layer node counts p,q,r,s")->delimiter(',');
    c->add_option("--k", cx.iterations, "Training iterations");
    c->add_option("--t", cx.samples, "Training samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : deepris::kExitConfig;
    }

    deepris::CliCommand cmd;
    CLI::App* active = nullptr;
    if (g->parsed()) {
        if (size_opt->count() > 0) gen.size = gen_size;
        cmd = gen;
        active = g;
    } else if (t->parsed()) {
        if (!history.empty()) tr.history_csv = history;
        cmd = tr;
        active = t;
    } else if (e->parsed()) {
        if (!scenarios.empty()) ev.scenario_file = scenarios;
        cmd = ev;
        active = e;
    } else if (s->parsed()) {
        cmd = sw;
        active = s;
    } else {
        cmd = cx;
        active = c;
    }

    deepris::RunConfig cfg;
    try {
        const std::vector<std::string> extras = active->remaining();
        const auto flags = deepris::parse_flag_overrides(extras);
        std::optional<std::filesystem::path> file;
        if (!common.config_path.empty()) file = common.config_path;
        cfg = deepris::parse_config(file, flags, std::getenv("DEEPRIS_SEED"));
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return deepris::exit_code_for(err);
    }
    return deepris::dispatch(cmd, cfg, std::cout, std::cerr);
}
