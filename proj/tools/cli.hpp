/*
 * Copyright (c) 2026, The Compass Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COMPASS_TOOLS_CLI_HPP_
#define COMPASS_TOOLS_CLI_HPP_

#include <ostream>

namespace compass {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitPipeline = 2, kExitMismatch = 3 };

// Entry point of the `compass` tool, with injectable streams for tests.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace compass

#endif  // COMPASS_TOOLS_CLI_HPP_
