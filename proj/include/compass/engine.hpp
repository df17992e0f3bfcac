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

#ifndef COMPASS_ENGINE_HPP_
#define COMPASS_ENGINE_HPP_

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compass/lts.hpp"
#include "compass/monitor.hpp"

namespace compass {

// Reproducible answers for every decision a run may reach. Queues are
// consumed in order; when one runs dry the run pauses for interactive input.
struct Scenario {
  std::string name;
  std::deque<std::string> choices;                     // pick events
  std::map<std::string, std::deque<bool>> branches;    // if/while id
  std::map<std::string, std::deque<int>> interleave;   // flow id
  std::deque<std::string> inject_ter_at;               // transition labels
  std::map<std::string, std::deque<std::string>> partner_outcomes;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

using MonitorVector = std::vector<MonitorState>;

struct ViolationReport {
  std::string property;
  PropertyKind kind = PropertyKind::kSafety;
  std::size_t monitor_index = 0;
  StateId error_state = 0;
  std::string pending_event;
  std::size_t trace_position = 0;
};

// The effective forward execution s0 a0 s1 ... a(n-1) sn. `steps` doubles as
// the compensation stack: the last element is compensated first.
struct ExecutionTrace {
  std::vector<StateId> states;
  std::vector<TransitionId> steps;
  std::vector<MonitorVector> snapshots;  // snapshots[i]: after a0..a(i-1)

  std::size_t length() const { return steps.size(); }
  std::vector<std::string> events(const Lts& lts) const;
};

// Monitor states recorded at the first occurrence of `state` on the trace.
MonitorVector snapshot_at(const ExecutionTrace& trace, StateId state);

struct LogEntry {
  StateId state = 0;  // state the event was emitted from
  std::string event;
  TransitionKind kind = TransitionKind::kForward;
  MonitorVector monitors;  // after the event
  std::string outcome;     // scripted partner outcome, if any
};

enum class RunStatus { kRunning, kAwaitingChoice, kViolated, kCompleted };
const char* to_string(RunStatus s);

// One live execution. Not thread-safe; callers serialize access.
class Run {
 public:
  Run(std::shared_ptr<const Lts> lts,
      std::shared_ptr<const std::vector<Monitor>> monitors, Scenario scenario);

  // Executes until a choice is needed, a violation is intercepted, or the run
  // completes.
  RunStatus Advance();

  // Supplies the label of one of pending_choices() and continues.
  RunStatus Answer(const std::string& label);

  // Recovery primitives. Undo pops the last forward step, emits its
  // compensation and restores the monitors to the snapshot taken before it.
  void Undo();
  // Fires a forward transition through the interception path. Returns false
  // (and records the violation) if delivering it would enter a red state.
  bool Fire(TransitionId t);
  // Clears an intercepted violation so the run may continue.
  void Resume();

  RunStatus status() const { return status_; }
  StateId current() const { return current_; }
  const ExecutionTrace& trace() const { return trace_; }
  const std::optional<ViolationReport>& violation() const { return violation_; }
  const std::vector<std::string>& pending_choices() const { return pending_; }
  const std::vector<LogEntry>& log() const { return log_; }
  const MonitorVector& monitor_states() const { return monitors_now_; }
  const Lts& lts() const { return *lts_; }
  const std::vector<Monitor>& monitors() const { return *monitors_; }
  std::shared_ptr<const Lts> lts_ptr() const { return lts_; }
  std::shared_ptr<const std::vector<Monitor>> monitors_ptr() const {
    return monitors_;
  }
  bool terminated_by_fault() const { return fault_terminated_; }

 private:
  // Returns the chosen transition, or nullopt when input is needed.
  std::optional<TransitionId> Choose(std::vector<TransitionId> enabled);
  bool Deliver(const std::string& event, TransitionKind kind,
               std::string outcome = {});
  void Complete();

  std::shared_ptr<const Lts> lts_;
  std::shared_ptr<const std::vector<Monitor>> monitors_;
  Scenario scenario_;

  RunStatus status_ = RunStatus::kRunning;
  StateId current_ = 0;
  ExecutionTrace trace_;
  MonitorVector monitors_now_;
  std::vector<LogEntry> log_;
  std::optional<ViolationReport> violation_;
  std::vector<std::string> pending_;
  std::optional<std::string> answer_;
  bool fault_terminated_ = false;
};

struct RunResult {
  RunStatus status = RunStatus::kRunning;
  ExecutionTrace trace;
  std::optional<ViolationReport> violation;
  std::vector<std::string> pending_choices;
};

// Runs a scenario to its first stop (violation, completion, or a choice the
// script does not answer).
RunResult run(std::shared_ptr<const Lts> lts,
              std::shared_ptr<const std::vector<Monitor>> monitors,
              const Scenario& scenario);

}  // namespace compass

#endif  // COMPASS_ENGINE_HPP_
