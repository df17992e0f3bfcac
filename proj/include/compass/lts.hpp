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

#ifndef COMPASS_LTS_HPP_
#define COMPASS_LTS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compass/workflow.hpp"

namespace compass {

using StateId = std::size_t;
using TransitionId = std::size_t;

inline constexpr const char* kTer = "TER";

enum class TransitionKind { kForward, kCompensation, kTermination };

// What a forward transition decides, if anything. Branch transitions of
// If/While carry the valuation ("true"/"false"); Pick transitions the event.
enum class DecisionKind { kNone, kPick, kBranch };

struct Transition {
  StateId src = 0;
  std::string label;
  StateId dst = 0;
  TransitionKind kind = TransitionKind::kForward;
  std::string activity;  // source activity id, empty for TER edges
  std::optional<TransitionId> reverses;  // compensation -> forward

  DecisionKind decision = DecisionKind::kNone;
  std::string decision_id;
  std::string decision_value;
  // Enclosing flows, outermost first: (flow id, branch index).
  std::vector<std::pair<std::string, int>> flow_path;
};

enum class ChangeKind { kPickEntry, kFlowEntry, kNonIdemInvoke };

struct ChangeInfo {
  ChangeKind kind;
  std::string activity;  // pick/flow id or invoke activity id
  std::string op;        // operation name for kNonIdemInvoke
};

struct Lts {
  std::size_t num_states = 0;
  std::vector<std::string> labels;  // Σ, sorted
  std::vector<Transition> transitions;
  std::vector<StateId> initial;
  StateId final_state = 0;  // normal completion
  StateId terminal = 0;     // target of every TER edge
  std::map<StateId, ChangeInfo> change_states;

  // Entry states of every Flow occurrence, with the flow id. Filled by
  // translate(); consumed by identify_change_states().
  std::vector<std::pair<StateId, std::string>> flow_entries;

  // Outgoing transition ids per state, in transition order.
  std::vector<std::vector<TransitionId>> out;

  std::vector<TransitionId> forward_out(StateId s) const;
  std::size_t forward_count() const;
  bool is_change_state(StateId s) const { return change_states.count(s) > 0; }
  void rebuild_index();
};

struct TranslateOptions {
  std::size_t max_states = 100000;
};

Lts translate(const WorkflowDef& def, const TranslateOptions& opts = {});

// Marks Pick entries, Flow entries and sources of non-idempotent invokes.
// Priority on collisions: Pick > Flow > NonIdemInvoke.
Lts identify_change_states(Lts lts, const WorkflowDef& def);

// translate() followed by identify_change_states().
Lts build_model(const WorkflowDef& def, const TranslateOptions& opts = {});

const char* to_string(TransitionKind k);
const char* to_string(ChangeKind k);

struct LtsStats {
  std::size_t states = 0;
  std::size_t forward = 0;
  std::size_t transitions = 0;
  std::size_t labels = 0;
  std::size_t change_states = 0;
};

LtsStats stats(const Lts& lts);

}  // namespace compass

#endif  // COMPASS_LTS_HPP_
