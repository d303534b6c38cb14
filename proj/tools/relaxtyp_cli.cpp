// Copyright 2026 The relaxtyp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "relaxtyp/commands.hpp"
#include "relaxtyp/run_config.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Initial-state typicality of Lindbladian relaxation"};
    app.set_version_flag("--version", std::string("relaxtyp ") + RELAXTYP_VERSION);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<unsigned> threads;
    bool quiet = false;
    app.add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Base seed, overrides the config");
    app.add_option("--output", output, "CSV output path, overrides the config");
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    app.add_flag("--quiet", quiet, "Suppress progress messages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : relaxtyp::kExitConfig;
    }

    try {
        relaxtyp::RunConfig config = relaxtyp::load_config(config_path);
        relaxtyp::apply_overrides(config, seed, output, threads);
        relaxtyp::RunOptions options;
        options.quiet = quiet;
        return relaxtyp::run(config, options);
    } catch (const std::exception& e) {
        std::cerr << "relaxtyp: error: " << e.what() << "\n";
        return relaxtyp::exit_code_for(e);
    }
}
