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

#include "compass/dependency.hpp"

#include <deque>
#include <map>

#include "compass/errors.hpp"

namespace compass {

namespace {

void add_var(std::set<std::string>& s, const std::string& v) {
  if (!v.empty()) s.insert(v);
}

// States reachable from `from` over forward edges that do not define `var`.
std::vector<bool> reach_without_def(const Lts& lts, const DefUseTable& table,
                                    StateId from, const std::string& var) {
  std::vector<bool> seen(lts.num_states, false);
  std::deque<StateId> q{from};
  seen[from] = true;
  while (!q.empty()) {
    StateId s = q.front();
    q.pop_front();
    for (TransitionId t : lts.out[s]) {
      const Transition& tr = lts.transitions[t];
      if (tr.kind != TransitionKind::kForward) continue;
      if (table.rows[t].def.count(var)) continue;
      if (!seen[tr.dst]) {
        seen[tr.dst] = true;
        q.push_back(tr.dst);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<TransitionId> control_transitions(const Lts& lts,
                                              const DefUseTable& table);

namespace {

std::vector<TransitionId> scoped_controls(const Lts& lts,
                                          const DefUseTable& table,
                                          const ExecutionTrace& trace,
                                          ControlScope scope) {
  std::vector<TransitionId> all = control_transitions(lts, table);
  if (scope == ControlScope::kModel) return all;
  std::set<TransitionId> taken(trace.steps.begin(), trace.steps.end());
  std::vector<TransitionId> out;
  for (TransitionId t : all) {
    if (taken.count(t)) out.push_back(t);
  }
  return out;
}

}  // namespace

DefUseTable build_defuse(const Lts& lts, const WorkflowDef& def) {
  std::map<std::string, const Activity*> idx;
  for_each_activity(def.root, [&](const Activity& a) { idx.emplace(a.id, &a); });
  DefUseTable table;
  table.rows.resize(lts.transitions.size());
  for (TransitionId t = 0; t < lts.transitions.size(); ++t) {
    const Transition& tr = lts.transitions[t];
    if (tr.kind != TransitionKind::kForward) continue;
    auto it = idx.find(tr.activity);
    if (it == idx.end()) continue;
    DefUse& row = table.rows[t];
    const ActivityNode& n = it->second->node;
    if (auto* r = std::get_if<Receive>(&n)) {
      add_var(row.def, r->var);
    } else if (auto* i = std::get_if<Invoke>(&n)) {
      add_var(row.use, i->input);
      add_var(row.def, i->output);
    } else if (auto* l = std::get_if<LocalCall>(&n)) {
      add_var(row.use, l->input);
      add_var(row.def, l->output);
    } else if (auto* a = std::get_if<Assign>(&n)) {
      add_var(row.use, a->from);
      add_var(row.def, a->to);
    } else if (tr.decision == DecisionKind::kBranch) {
      const std::vector<std::string>* vars = nullptr;
      if (auto* f = std::get_if<If>(&n)) vars = &f->cond_vars;
      if (auto* w = std::get_if<While>(&n)) vars = &w->cond_vars;
      if (vars) {
        for (const auto& v : *vars) add_var(row.use, v);
      }
    }
  }
  return table;
}

bool directly_data_dependent(const Lts& lts, const DefUseTable& table,
                             TransitionId u, TransitionId v) {
  const Transition& tu = lts.transitions.at(u);
  const Transition& tv = lts.transitions.at(v);
  if (tu.kind != TransitionKind::kForward ||
      tv.kind != TransitionKind::kForward) {
    return false;
  }
  for (const auto& x : table.at(u).def) {
    if (!table.at(v).use.count(x)) continue;
    if (reach_without_def(lts, table, tu.dst, x)[tv.src]) return true;
  }
  return false;
}

DependencyRelation build_dependencies(const Lts& lts,
                                      const DefUseTable& table) {
  DependencyRelation rel;
  std::map<std::string, std::vector<TransitionId>> users;
  for (TransitionId t = 0; t < table.rows.size(); ++t) {
    for (const auto& x : table.rows[t].use) users[x].push_back(t);
  }
  std::vector<std::vector<TransitionId>> succ(lts.transitions.size());
  for (TransitionId u = 0; u < table.rows.size(); ++u) {
    for (const auto& x : table.rows[u].def) {
      auto it = users.find(x);
      if (it == users.end()) continue;
      auto seen = reach_without_def(lts, table, lts.transitions[u].dst, x);
      for (TransitionId v : it->second) {
        if (seen[lts.transitions[v].src] && rel.direct.emplace(v, u).second) {
          succ[u].push_back(v);
        }
      }
    }
  }
  // Chains of directly dependent sections.
  for (TransitionId u = 0; u < succ.size(); ++u) {
    if (succ[u].empty()) continue;
    std::vector<bool> seen(succ.size(), false);
    std::deque<TransitionId> q(succ[u].begin(), succ[u].end());
    for (auto v : succ[u]) seen[v] = true;
    while (!q.empty()) {
      TransitionId v = q.front();
      q.pop_front();
      rel.closure.emplace(v, u);
      for (TransitionId w : succ[v]) {
        if (!seen[w]) {
          seen[w] = true;
          q.push_back(w);
        }
      }
    }
  }
  return rel;
}

bool data_dependent(const DependencyRelation& rel, TransitionId u,
                    TransitionId v) {
  return rel.closure.count({v, u}) > 0;
}

std::vector<TransitionId> control_transitions(const Lts& lts,
                                              const DefUseTable& table) {
  std::vector<TransitionId> out;
  for (TransitionId t = 0; t < lts.transitions.size(); ++t) {
    const Transition& tr = lts.transitions[t];
    if (tr.kind == TransitionKind::kForward &&
        tr.decision == DecisionKind::kBranch && !table.rows[t].use.empty()) {
      out.push_back(t);
    }
  }
  return out;
}

TransitionId change_invoke(const Lts& lts, StateId s) {
  const ChangeInfo& info = lts.change_states.at(s);
  for (TransitionId t : lts.out[s]) {
    const Transition& tr = lts.transitions[t];
    if (tr.kind == TransitionKind::kForward && tr.activity == info.activity) {
      return t;
    }
  }
  throw Error("InternalError", "change state " + std::to_string(s) +
                                   " has no invoke transition");
}

std::set<StateId> visited_change_states(const Lts& lts,
                                        const ExecutionTrace& trace) {
  std::set<StateId> out;
  for (StateId s : trace.states) {
    if (lts.is_change_state(s)) out.insert(s);
  }
  return out;
}

std::set<StateId> relevant_change_states(const Lts& lts,
                                         const DefUseTable& table,
                                         const DependencyRelation& rel,
                                         const ExecutionTrace& trace,
                                         ControlScope scope) {
  std::vector<TransitionId> controls =
      scoped_controls(lts, table, trace, scope);
  std::set<StateId> out;
  for (StateId s : visited_change_states(lts, trace)) {
    const ChangeInfo& info = lts.change_states.at(s);
    if (info.kind != ChangeKind::kNonIdemInvoke) {
      out.insert(s);
      continue;
    }
    TransitionId inv = change_invoke(lts, s);
    for (TransitionId c : controls) {
      if (data_dependent(rel, inv, c)) {
        out.insert(s);
        break;
      }
    }
  }
  return out;
}

std::vector<TraceCall> trace_calls(const Lts& lts, const WorkflowDef& def,
                                   const DefUseTable& table,
                                   const DependencyRelation& rel,
                                   const ExecutionTrace& trace,
                                   ControlScope scope) {
  std::vector<TransitionId> controls =
      scoped_controls(lts, table, trace, scope);
  std::vector<TraceCall> out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    TransitionId t = trace.steps[i];
    const Activity* a = find_activity(def, lts.transitions[t].activity);
    const Invoke* inv = a ? a->as<Invoke>() : nullptr;
    if (!inv || inv->idempotent) continue;
    TraceCall call{i, t, inv->op, false};
    for (TransitionId c : controls) {
      if (data_dependent(rel, t, c)) {
        call.relevant = true;
        break;
      }
    }
    out.push_back(call);
  }
  return out;
}

std::vector<PredicateDependence> predicate_dependences(
    const Lts& lts, const WorkflowDef& def, const DefUseTable& table,
    const DependencyRelation& rel) {
  std::vector<PredicateDependence> rows;
  for_each_activity(def.root, [&](const Activity& a) {
    const std::vector<std::string>* vars = nullptr;
    if (auto* f = a.as<If>()) vars = &f->cond_vars;
    if (auto* w = a.as<While>()) vars = &w->cond_vars;
    if (!vars) return;
    rows.push_back({a.id, *vars, {}});
  });
  std::vector<TransitionId> controls = control_transitions(lts, table);
  for (const auto& [s, info] : lts.change_states) {
    if (info.kind != ChangeKind::kNonIdemInvoke) continue;
    TransitionId inv = change_invoke(lts, s);
    for (TransitionId c : controls) {
      if (!data_dependent(rel, inv, c)) continue;
      for (auto& row : rows) {
        if (row.predicate == lts.transitions[c].decision_id) {
          row.ops.insert(info.op);
        }
      }
    }
  }
  return rows;
}

}  // namespace compass
