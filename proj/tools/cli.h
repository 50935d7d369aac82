// Copyright 2026 The ERACL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ERACL_TOOLS_CLI_H_
#define ERACL_TOOLS_CLI_H_

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "eracl/config.h"

namespace eracl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// Environment variable naming the base directory for run outputs.
inline constexpr const char* kRunDirEnv = "ERACL_RUN_DIR";

// args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// defaults < profile < config file < overrides. A `profile` key inside the
// config file selects the base profile unless `profile` is non-empty.
TrainConfig ResolveConfig(const std::string& profile,
                          const std::string& config_text,
                          const std::map<std::string, std::string>& overrides);

}  // namespace eracl::cli

#endif  // ERACL_TOOLS_CLI_H_
