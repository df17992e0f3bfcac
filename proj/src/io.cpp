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

#include "compass/io.hpp"

#include <fstream>
#include <sstream>

#include "compass/errors.hpp"

namespace compass {

namespace {

const char* color_name(Color c) { return to_string(c); }

PropertyKind parse_kind(const std::string& s) {
  if (s == "safety") return PropertyKind::kSafety;
  if (s == "liveness") return PropertyKind::kLiveness;
  throw ValidationError("unknown property kind '" + s + "'");
}

RunStatus parse_status(const std::string& s) {
  for (RunStatus r : {RunStatus::kRunning, RunStatus::kAwaitingChoice,
                      RunStatus::kViolated, RunStatus::kCompleted}) {
    if (s == to_string(r)) return r;
  }
  throw ValidationError("unknown run status '" + s + "'");
}

}  // namespace

Json to_json(const Lts& lts) {
  Json j;
  j["states"] = lts.num_states;
  j["initial"] = lts.initial;
  j["final"] = lts.final_state;
  j["terminal"] = lts.terminal;
  j["labels"] = lts.labels;
  Json ts = Json::array();
  for (TransitionId i = 0; i < lts.transitions.size(); ++i) {
    const Transition& t = lts.transitions[i];
    Json r{{"id", i},
           {"src", t.src},
           {"label", t.label},
           {"dst", t.dst},
           {"kind", to_string(t.kind)}};
    if (!t.activity.empty()) r["activity"] = t.activity;
    if (t.reverses) r["reverses"] = *t.reverses;
    ts.push_back(std::move(r));
  }
  j["transitions"] = std::move(ts);
  Json cs = Json::array();
  for (const auto& [s, info] : lts.change_states) {
    Json r{{"state", s},
           {"kind", to_string(info.kind)},
           {"activity", info.activity}};
    if (!info.op.empty()) r["op"] = info.op;
    cs.push_back(std::move(r));
  }
  j["change_states"] = std::move(cs);
  return j;
}

Json to_json(const Monitor& m) {
  Json j;
  j["name"] = m.name;
  j["kind"] = to_string(m.kind);
  j["states"] = m.num_states;
  j["initial"] = m.initial;
  j["alphabet"] = m.alphabet;
  Json colors = Json::array();
  for (Color c : m.colors) colors.push_back(color_name(c));
  j["colors"] = std::move(colors);
  Json delta = Json::array();
  for (MonitorState q = 0; q < m.num_states; ++q) {
    for (const auto& [e, to] : m.delta[q]) {
      delta.push_back({{"from", q}, {"event", e}, {"to", to}});
    }
  }
  j["delta"] = std::move(delta);
  return j;
}

Json to_json(const ViolationReport& v) {
  return Json{{"property", v.property},
              {"kind", to_string(v.kind)},
              {"monitor", v.monitor_index},
              {"error_state", v.error_state},
              {"pending_event", v.pending_event},
              {"trace_position", v.trace_position}};
}

Json to_json(const Plan& plan, const Lts& lts) {
  Json steps = Json::array();
  for (const auto& u : plan.undo) {
    steps.push_back({{"kind", "comp"},
                     {"label", u.label},
                     {"reverses", lts.transitions[u.transition].label},
                     {"transition", u.transition}});
  }
  for (TransitionId t : plan.redo) {
    steps.push_back({{"kind", "forward"},
                     {"label", lts.transitions[t].label},
                     {"transition", t}});
  }
  return Json{{"change_state", plan.change_state},
              {"change_index", plan.change_index},
              {"steps", std::move(steps)},
              {"total_length", plan.total_length},
              {"compensation_count", plan.compensation_count},
              {"discovery_index", plan.discovery_index}};
}

Json to_json(const TraceFile& tf, const Lts& lts) {
  Json j;
  j["workflow"] = tf.workflow;
  j["properties"] = tf.properties;
  j["scenario"] = tf.scenario;
  j["status"] = to_string(tf.status);
  const ExecutionTrace& tr = tf.trace;
  j["initial"] = {{"state", tr.states.front()},
                  {"monitors", tr.snapshots.front()}};
  Json recs = Json::array();
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    recs.push_back({{"state", tr.states[i]},
                    {"event", lts.transitions[tr.steps[i]].label},
                    {"monitors", tr.snapshots[i + 1]}});
  }
  j["records"] = std::move(recs);
  j["final_state"] = tr.states.back();
  if (tf.violation) j["violation"] = to_json(*tf.violation);
  return j;
}

TraceFile trace_header(const Json& j) {
  TraceFile tf;
  try {
    tf.workflow = j.at("workflow").get<std::string>();
    tf.properties = j.at("properties").get<std::string>();
    tf.scenario = j.value("scenario", std::string());
    tf.status = parse_status(j.at("status").get<std::string>());
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed trace file: ") + e.what());
  }
  return tf;
}

TraceFile trace_from_json(const Json& j, const Lts& lts) {
  TraceFile tf = trace_header(j);
  try {
    ExecutionTrace& tr = tf.trace;
    tr.states.push_back(j.at("initial").at("state").get<StateId>());
    tr.snapshots.push_back(
        j.at("initial").at("monitors").get<MonitorVector>());
    const Json& recs = j.at("records");
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const Json& r = recs[i];
      StateId s = r.at("state").get<StateId>();
      std::string ev = r.at("event").get<std::string>();
      if (s != tr.states.back() || s >= lts.num_states) {
        throw ValidationError("record " + std::to_string(i) +
                              " does not continue the trace");
      }
      StateId next = i + 1 < recs.size()
                         ? recs[i + 1].at("state").get<StateId>()
                         : j.at("final_state").get<StateId>();
      std::optional<TransitionId> hit;
      for (TransitionId t : lts.forward_out(s)) {
        const Transition& tt = lts.transitions[t];
        if (tt.label == ev && tt.dst == next) {
          hit = t;
          break;
        }
      }
      if (!hit) {
        throw ValidationError("record " + std::to_string(i) + " (" + ev +
                              ") matches no transition of the model");
      }
      tr.steps.push_back(*hit);
      tr.states.push_back(next);
      tr.snapshots.push_back(r.at("monitors").get<MonitorVector>());
    }
    if (j.contains("violation")) {
      const Json& v = j["violation"];
      tf.violation = ViolationReport{
          v.at("property").get<std::string>(),
          parse_kind(v.at("kind").get<std::string>()),
          v.at("monitor").get<std::size_t>(),
          v.at("error_state").get<StateId>(),
          v.at("pending_event").get<std::string>(),
          v.at("trace_position").get<std::size_t>()};
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed trace file: ") + e.what());
  }
  return tf;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("IoError", "cannot write '" + path + "'");
  out << text;
}

}  // namespace compass
