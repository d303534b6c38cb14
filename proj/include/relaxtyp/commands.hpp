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

#pragma once

#include <iosfwd>

#include "relaxtyp/run_config.hpp"

namespace relaxtyp {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitViolation = 4,
};

struct RunOptions {
    bool quiet = false;
    /// Progress messages; std::cerr when null.
    std::ostream* log = nullptr;
};

/// Executes the configured command, writing the CSV and the JSON summary.
/// Returns kExitOk or kExitViolation; errors propagate as exceptions.
int run(const RunConfig& config, const RunOptions& options = {});

/// Maps an exception from run() to its exit code.
int exit_code_for(const std::exception& e);

} // namespace relaxtyp
