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

#ifndef COMPASS_DEPENDENCY_HPP_
#define COMPASS_DEPENDENCY_HPP_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "compass/engine.hpp"
#include "compass/lts.hpp"
#include "compass/workflow.hpp"

namespace compass {

struct DefUse {
  std::set<std::string> def;
  std::set<std::string> use;
};

// Indexed by transition id. Rows of compensation and termination edges stay
// empty.
struct DefUseTable {
  std::vector<DefUse> rows;
  const DefUse& at(TransitionId t) const { return rows.at(t); }
};

DefUseTable build_defuse(const Lts& lts, const WorkflowDef& def);

// True iff some variable defined by u is used by v and reaches v's source
// along a forward path that does not redefine it.
bool directly_data_dependent(const Lts& lts, const DefUseTable& table,
                             TransitionId u, TransitionId v);

// Pairs are stored as (v, u): v depends on u.
struct DependencyRelation {
  std::set<std::pair<TransitionId, TransitionId>> direct;
  std::set<std::pair<TransitionId, TransitionId>> closure;
};

DependencyRelation build_dependencies(const Lts& lts, const DefUseTable& table);

bool data_dependent(const DependencyRelation& rel, TransitionId u,
                    TransitionId v);

// Forward branch transitions of If/While that read at least one variable.
std::vector<TransitionId> control_transitions(const Lts& lts,
                                              const DefUseTable& table);

// The invoke transition leaving a non-idempotent change state.
TransitionId change_invoke(const Lts& lts, StateId s);

std::set<StateId> visited_change_states(const Lts& lts,
                                        const ExecutionTrace& trace);

// Which control transitions may make a non-idempotent call relevant: any in
// the model, or only those executed on the trace.
enum class ControlScope { kModel, kTrace };

std::set<StateId> relevant_change_states(
    const Lts& lts, const DefUseTable& table, const DependencyRelation& rel,
    const ExecutionTrace& trace, ControlScope scope = ControlScope::kTrace);

// Non-idempotent invoke steps executed on the trace, each flagged with
// whether some control predicate is data dependent on it.
struct TraceCall {
  std::size_t step = 0;
  TransitionId transition = 0;
  std::string op;
  bool relevant = false;
};

std::vector<TraceCall> trace_calls(const Lts& lts, const WorkflowDef& def,
                                   const DefUseTable& table,
                                   const DependencyRelation& rel,
                                   const ExecutionTrace& trace,
                                   ControlScope scope = ControlScope::kTrace);

// One row per If/While predicate: its condition variables and the
// non-idempotent operations it is data dependent on.
struct PredicateDependence {
  std::string predicate;
  std::vector<std::string> cond_vars;
  std::set<std::string> ops;
};

std::vector<PredicateDependence> predicate_dependences(
    const Lts& lts, const WorkflowDef& def, const DefUseTable& table,
    const DependencyRelation& rel);

}  // namespace compass

#endif  // COMPASS_DEPENDENCY_HPP_
