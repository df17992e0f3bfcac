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

#ifndef COMPASS_PLANNER_HPP_
#define COMPASS_PLANNER_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "compass/engine.hpp"
#include "compass/lts.hpp"
#include "compass/monitor.hpp"
#include "compass/sat.hpp"

namespace compass {

// One undo step reverses trace step `transition`; `label` is its compensation
// operation or "noop" when the activity declares none.
struct UndoStep {
  TransitionId transition = 0;
  std::string label;
};

struct Plan {
  std::vector<UndoStep> undo;  // LIFO over the trace suffix
  StateId change_state = 0;
  std::size_t change_index = 0;  // position of change_state on the trace
  std::vector<TransitionId> redo;

  // Where the plan was computed from; execute_plan checks these.
  std::size_t origin_length = 0;
  StateId origin_state = 0;

  std::size_t total_length = 0;
  std::size_t compensation_count = 0;  // undo steps with a real compensation
  std::size_t discovery_index = 0;

  std::vector<std::string> redo_labels(const Lts& lts) const;
  std::vector<std::string> labels(const Lts& lts) const;  // undo then redo
};

// Identity of a plan as an action sequence: undo length, then redo ids.
std::vector<std::size_t> plan_key(const Plan& p);

struct PlanningProblem {
  std::shared_ptr<const Lts> lts;
  ExecutionTrace trace;
  std::set<StateId> candidates;
  PropertyKind kind = PropertyKind::kSafety;
  Monitor violated;
  std::size_t monitor_index = 0;
  std::size_t k = 10;
  std::size_t n = 0;  // 0 enumerates every plan
};

// Builds a problem from a run halted on a violation.
PlanningProblem make_problem(const Run& run, std::set<StateId> candidates,
                             std::size_t k, std::size_t n = 0);

// Same, from a recorded trace and its violation.
PlanningProblem make_problem(std::shared_ptr<const Lts> lts,
                             const std::vector<Monitor>& monitors,
                             const ExecutionTrace& trace,
                             const ViolationReport& violation,
                             std::set<StateId> candidates, std::size_t k,
                             std::size_t n = 0);

// Undo-only plans, one per candidate reachable within k compensations.
std::vector<Plan> safety_plans(const PlanningProblem& problem);

struct EncodeLimits {
  std::size_t max_vars = 4'000'000;
  std::size_t max_clauses = 40'000'000;
};

// Time-indexed CNF for liveness recovery plus what is needed to decode it.
struct Encoding {
  CnfInstance cnf;
  std::size_t k = 0;
  std::size_t trace_length = 0;
  std::vector<TransitionId> forward;        // forward edges, by action index
  std::vector<int> undo_var;                // per time step, 0 if absent
  std::vector<int> noop_var;                // per time step
  std::vector<std::vector<int>> act_var;    // [t][action index]
};

Encoding encode(const PlanningProblem& problem, const EncodeLimits& limits = {});

// Reads the plan out of a model of `enc`.
Plan decode(const Encoding& enc, const SatModel& model,
            const PlanningProblem& problem);

struct EnumerateOptions {
  EncodeLimits encode_limits;
  SolveLimits solve_limits;
  // Test hook applied to every blocking clause before it is added.
  std::function<void(Clause&)> blocking_hook;
};

struct PlanStats {
  std::size_t vars = 0;
  std::size_t clauses = 0;
  std::size_t candidates = 0;
  std::size_t plans = 0;
  double seconds = 0;
};

// Liveness plans in discovery order, distinct as action sequences.
std::vector<Plan> enumerate(const PlanningProblem& problem,
                            const EnumerateOptions& opts = {},
                            PlanStats* stats = nullptr);

// Explicit search with the same semantics as enumerate(); used as an oracle.
std::vector<Plan> dfs_plans(const PlanningProblem& problem);

// Stable sort by (total_length, compensation_count, discovery_index).
std::vector<Plan> rank(std::vector<Plan> plans);

// Dispatches on the violation kind, then ranks.
std::vector<Plan> generate_plans(const PlanningProblem& problem,
                                 const EnumerateOptions& opts = {},
                                 PlanStats* stats = nullptr);

// True if some safety monitor, restarted from its snapshot at the change
// state, reaches red along the redo segment.
bool forbidden_by_snapshot(const Plan& plan, const ExecutionTrace& trace,
                           const Lts& lts, const std::vector<Monitor>& monitors);

// Prefix of the trace up to the change state followed by the redo labels.
std::vector<std::string> validation_trace(const Plan& plan,
                                          const ExecutionTrace& trace,
                                          const Lts& lts);

// Same decision as forbidden_by_snapshot, replaying monitors from scratch.
bool forbidden_by_replay(const Plan& plan, const ExecutionTrace& trace,
                         const Lts& lts, const std::vector<Monitor>& monitors);

std::vector<Plan> filter_forbidden(const std::vector<Plan>& plans,
                                   const ExecutionTrace& trace, const Lts& lts,
                                   const std::vector<Monitor>& monitors);

// Undoes, then replays, through the run's interception path. Returns the run
// status afterwards: kViolated if a monitor would have entered red.
RunStatus execute_plan(Run& run, const Plan& plan);

}  // namespace compass

#endif  // COMPASS_PLANNER_HPP_
