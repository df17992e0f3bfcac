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

#ifndef COMPASS_IO_HPP_
#define COMPASS_IO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "compass/engine.hpp"
#include "compass/lts.hpp"
#include "compass/monitor.hpp"
#include "compass/planner.hpp"
#include "json.hpp"

namespace compass {

using Json = nlohmann::ordered_json;

Json to_json(const Lts& lts);
Json to_json(const Monitor& m);
Json to_json(const ViolationReport& v);
Json to_json(const Plan& plan, const Lts& lts);

// A recorded run: the inputs it came from plus the trace and its outcome.
struct TraceFile {
  std::string workflow;
  std::string properties;
  std::string scenario;
  RunStatus status = RunStatus::kRunning;
  ExecutionTrace trace;
  std::optional<ViolationReport> violation;
};

Json to_json(const TraceFile& tf, const Lts& lts);

// Rebuilds the trace against `lts`; every record must match a forward
// transition. Throws ValidationError otherwise.
TraceFile trace_from_json(const Json& j, const Lts& lts);

// Reads only the input paths, so the model can be rebuilt first.
TraceFile trace_header(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace compass

#endif  // COMPASS_IO_HPP_
