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

#include <filesystem>

#include "compass/errors.hpp"
#include "compass/io.hpp"
#include "compass/planner.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace compass;

TEST_CASE("trace files round trip") {
  Run r = testing::scenario_run("t2.scn");
  TraceFile tf{"w.wf", "p.props", "t2.scn", r.status(), r.trace(), r.violation()};
  Json j = to_json(tf, r.lts());
  CHECK(j["records"].size() == r.trace().length());
  CHECK(j["final_state"] == r.current());

  TraceFile back = trace_from_json(Json::parse(j.dump()), r.lts());
  CHECK(back.workflow == "w.wf");
  CHECK(back.status == RunStatus::kViolated);
  CHECK(back.trace.steps == r.trace().steps);
  CHECK(back.trace.states == r.trace().states);
  CHECK(back.trace.snapshots == r.trace().snapshots);
  REQUIRE(back.violation);
  CHECK(back.violation->pending_event == kTer);
  CHECK(back.violation->property == "P2");

  TraceFile head = trace_header(j);
  CHECK(head.properties == "p.props");
  CHECK(head.trace.steps.empty());
}

TEST_CASE("trace files are validated against the model") {
  Run r = testing::scenario_run("t1.scn");
  TraceFile tf{"", "", "", r.status(), r.trace(), r.violation()};
  Json j = to_json(tf, r.lts());
  Json bad_event = j;
  bad_event["records"][2]["event"] = "no-such-event";
  CHECK_THROWS_AS(trace_from_json(bad_event, r.lts()), ValidationError);
  Json bad_state = j;
  bad_state["final_state"] = 9999;
  CHECK_THROWS_AS(trace_from_json(bad_state, r.lts()), ValidationError);
  Json truncated = j;
  truncated.erase("records");
  CHECK_THROWS_AS(trace_from_json(truncated, r.lts()), ValidationError);
}

TEST_CASE("model and plan documents") {
  const Lts& lts = *testing::tbs().lts;
  Json m = to_json(lts);
  CHECK(m["transitions"].size() == lts.transitions.size());
  CHECK(m["change_states"].size() == lts.change_states.size());

  Json mon = to_json(testing::tbs().monitors->at(1));
  CHECK(mon["name"] == "P2");

  Run r = testing::scenario_run("t2.scn");
  auto plans = generate_plans(
      make_problem(r, visited_change_states(r.lts(), r.trace()), 10));
  REQUIRE_FALSE(plans.empty());
  Json p = to_json(plans[0], r.lts());
  std::size_t comps = 0, fwd = 0;
  for (const auto& s : p["steps"]) {
    if (s["kind"] == "comp") ++comps;
    if (s["kind"] == "forward") ++fwd;
  }
  CHECK(comps == plans[0].undo.size());
  CHECK(fwd == plans[0].redo.size());
}

TEST_CASE("file helpers") {
  auto dir = std::filesystem::temp_directory_path() / "compass-io-test";
  std::filesystem::create_directories(dir);
  std::string path = (dir / "x.json").string();
  write_text_file(path, R"({"a": [1, 2]})");
  CHECK(read_json_file(path)["a"][1] == 2);
  write_text_file(path, "{oops");
  CHECK_THROWS_AS(read_json_file(path), Error);
  CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), Error);
  std::filesystem::remove_all(dir);
}
