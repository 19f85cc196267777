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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deepris/config.hpp"
#include "deepris/eval.hpp"

namespace deepris {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitNumeric = 4 };

struct GenerateCommand {
    std::filesystem::path out;
    std::optional<std::size_t> size;  // defaults to train_samples
};

struct TrainCommand {
    std::filesystem::path data;
    std::filesystem::path checkpoint;
    std::optional<std::filesystem::path> history_csv;
};

struct EvalCommand {
    std::filesystem::path checkpoint;
    std::optional<std::filesystem::path> scenario_file;
    std::filesystem::path csv;
};

struct SweepCommand {
    std::filesystem::path data;
    std::vector<double> rates;
    std::filesystem::path csv;
};

struct ComplexityCommand {
    std::vector<std::uint64_t> nodes{500, 250, 100, 2};
    std::uint64_t iterations = 1;
    std::uint64_t samples = 1;
};

using CliCommand = std::variant<GenerateCommand, TrainCommand, EvalCommand, SweepCommand, ComplexityCommand>;

/// Header `scenario,detector,snr_db,bits,errors,ber,ci95,seed`, one row per
/// curve point, preceded by `# ` lines for each entry of `comments`.
std::string format_ber_csv(std::span<const BerCurve> curves, std::span<const std::string> comments = {});
void write_csv(std::span<const BerCurve> curves, const std::filesystem::path& path,
               std::span<const std::string> comments = {});

std::string format_history_csv(std::span<const LearningRateRun> runs, std::span<const std::string> comments = {});

/// Runs one command. Errors are reported on `err` and mapped to exit codes.
int dispatch(const CliCommand& cmd, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses `--key value` / `--key=value` pairs left over after subcommand options.
kv::Entries parse_flag_overrides(std::span<const std::string> args);

/// Maps an in-flight exception to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace deepris
