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

#include "compass/lts.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include "compass/errors.hpp"

namespace compass {

namespace {

struct Edge {
  int src;
  int dst;
  std::string label;
  TransitionKind kind = TransitionKind::kForward;
  std::string activity;
  DecisionKind decision = DecisionKind::kNone;
  std::string decision_id;
  std::string decision_value;
  std::vector<std::pair<std::string, int>> flow_path;
};

// Mutable graph under construction. Joins are recorded with union-find and
// resolved by Canonical().
class Graph {
 public:
  explicit Graph(std::size_t cap) : cap_(cap) {}

  int NewState() {
    if (parent_.size() >= cap_) {
      throw ModelTooLarge("state count exceeds cap of " +
                          std::to_string(cap_));
    }
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int Find(int s) {
    while (parent_[s] != s) {
      parent_[s] = parent_[parent_[s]];
      s = parent_[s];
    }
    return s;
  }

  int Join(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return a;
    // Keep the smaller id as representative so numbering stays stable.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

  int Terminal() {
    if (terminal_ < 0) terminal_ = NewState();
    return terminal_;
  }
  int terminal_state() const { return terminal_; }

  std::size_t size() const { return parent_.size(); }

  std::vector<Edge> edges;
  std::vector<std::pair<int, std::string>> flow_entries;

 private:
  std::size_t cap_;
  std::vector<int> parent_;
  int terminal_ = -1;
};

// A finished sub-graph with canonical state ids and an adjacency index.
struct Frozen {
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> out;
  std::set<std::pair<int, std::string>> flow_entries;
  int entry = 0;
  int exit = 0;
  int terminal = -1;
};

Frozen Freeze(Graph& g, int entry, int exit) {
  Frozen f;
  f.entry = g.Find(entry);
  f.exit = g.Find(exit);
  f.terminal = g.terminal_state() < 0 ? -1 : g.Find(g.terminal_state());
  f.out.resize(g.size());
  for (const Edge& e : g.edges) {
    Edge c = e;
    c.src = g.Find(e.src);
    c.dst = g.Find(e.dst);
    f.out[c.src].push_back(f.edges.size());
    f.edges.push_back(std::move(c));
  }
  for (const auto& [s, id] : g.flow_entries) f.flow_entries.emplace(g.Find(s), id);
  return f;
}

class Translator {
 public:
  explicit Translator(std::size_t cap) : cap_(cap) {}

  int Build(Graph& g, const Activity& a, int entry) {
    return std::visit(
        [&](const auto& n) -> int {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Receive> ||
                        std::is_same_v<T, Assign>) {
            return Atomic(g, a, a.id, entry);
          } else if constexpr (std::is_same_v<T, Invoke> ||
                               std::is_same_v<T, LocalCall>) {
            return Atomic(g, a, n.op, entry);
          } else if constexpr (std::is_same_v<T, Terminate>) {
            Edge e{entry, g.Terminal(), kTer, TransitionKind::kTermination,
                   a.id};
            g.edges.push_back(std::move(e));
            return g.NewState();  // unreachable continuation, pruned later
          } else if constexpr (std::is_same_v<T, Sequence>) {
            int cur = entry;
            for (const auto& c : n.children) cur = Build(g, c, cur);
            return cur;
          } else if constexpr (std::is_same_v<T, Pick>) {
            int exit = -1;
            for (std::size_t i = 0; i < n.events.size(); ++i) {
              int b = g.NewState();
              Edge e{entry, b, n.events[i], TransitionKind::kForward, a.id,
                     DecisionKind::kPick, a.id, n.events[i]};
              g.edges.push_back(std::move(e));
              int end = Build(g, n.bodies[i], b);
              exit = exit < 0 ? end : g.Join(exit, end);
            }
            return exit;
          } else if constexpr (std::is_same_v<T, If>) {
            int t = Branch(g, a, entry, true);
            int e1 = Build(g, n.branches[0], t);
            int f = Branch(g, a, entry, false);
            int e2 = n.branches.size() > 1 ? Build(g, n.branches[1], f) : f;
            return g.Join(e1, e2);
          } else if constexpr (std::is_same_v<T, While>) {
            int exit = g.NewState();
            int cur = entry;
            for (int i = 0; i < n.max_iter; ++i) {
              int f = Branch(g, a, cur, false);
              exit = g.Join(exit, f);
              int t = Branch(g, a, cur, true);
              cur = Build(g, n.body[0], t);
            }
            int f = Branch(g, a, cur, false);
            return g.Join(exit, f);
          } else if constexpr (std::is_same_v<T, Flow>) {
            return BuildFlow(g, a, n, entry);
          }
        },
        a.node);
  }

 private:
  int Atomic(Graph& g, const Activity& a, const std::string& label,
             int entry) {
    int dst = g.NewState();
    Edge e{entry, dst, label, TransitionKind::kForward, a.id};
    g.edges.push_back(std::move(e));
    return dst;
  }

  int Branch(Graph& g, const Activity& a, int entry, bool value) {
    int dst = g.NewState();
    std::string v = value ? "true" : "false";
    Edge e{entry, dst, a.id + "." + v, TransitionKind::kForward, a.id,
           DecisionKind::kBranch, a.id, v};
    g.edges.push_back(std::move(e));
    return dst;
  }

  // Full interleaving product of independently translated branches.
  int BuildFlow(Graph& g, const Activity& a, const Flow& n, int entry) {
    std::vector<Frozen> subs;
    for (const auto& b : n.branches) {
      Graph sub(cap_);
      int s0 = sub.NewState();
      int ex = Build(sub, b, s0);
      subs.push_back(Freeze(sub, s0, ex));
    }
    std::vector<int> start, finish;
    for (const auto& s : subs) {
      start.push_back(s.entry);
      finish.push_back(s.exit);
    }

    std::map<std::vector<int>, int> ids;
    std::deque<std::vector<int>> queue;
    ids.emplace(start, entry);
    queue.push_back(start);
    g.flow_entries.emplace_back(entry, a.id);
    while (!queue.empty()) {
      std::vector<int> tuple = std::move(queue.front());
      queue.pop_front();
      int here = ids.at(tuple);
      for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i].flow_entries.empty()) continue;
        for (const auto& [s, id] : subs[i].flow_entries) {
          if (s == tuple[i]) g.flow_entries.emplace_back(here, id);
        }
      }
      for (std::size_t i = 0; i < subs.size(); ++i) {
        for (std::size_t ei : subs[i].out[tuple[i]]) {
          const Edge& se = subs[i].edges[ei];
          Edge e = se;
          e.src = here;
          e.flow_path.insert(e.flow_path.begin(),
                             {a.id, static_cast<int>(i)});
          if (se.dst == subs[i].terminal) {
            e.dst = g.Terminal();
          } else {
            std::vector<int> next = tuple;
            next[i] = se.dst;
            auto it = ids.find(next);
            if (it == ids.end()) {
              it = ids.emplace(next, g.NewState()).first;
              queue.push_back(next);
            }
            e.dst = it->second;
          }
          g.edges.push_back(std::move(e));
        }
      }
    }
    auto it = ids.find(finish);
    return it != ids.end() ? it->second : g.NewState();
  }

  std::size_t cap_;
};

std::unordered_map<std::string, const Activity*> IndexActivities(
    const WorkflowDef& def) {
  std::unordered_map<std::string, const Activity*> idx;
  for_each_activity(def.root, [&](const Activity& a) { idx.emplace(a.id, &a); });
  return idx;
}

}  // namespace

std::vector<TransitionId> Lts::forward_out(StateId s) const {
  std::vector<TransitionId> r;
  for (TransitionId t : out[s]) {
    if (transitions[t].kind == TransitionKind::kForward) r.push_back(t);
  }
  return r;
}

std::size_t Lts::forward_count() const {
  return static_cast<std::size_t>(
      std::count_if(transitions.begin(), transitions.end(), [](const auto& t) {
        return t.kind == TransitionKind::kForward;
      }));
}

void Lts::rebuild_index() {
  out.assign(num_states, {});
  std::set<std::string> sigma;
  for (TransitionId i = 0; i < transitions.size(); ++i) {
    out[transitions[i].src].push_back(i);
    sigma.insert(transitions[i].label);
  }
  labels.assign(sigma.begin(), sigma.end());
}

Lts translate(const WorkflowDef& def, const TranslateOptions& opts) {
  Graph g(opts.max_states);
  Translator tr(opts.max_states);
  int s0 = g.NewState();
  int exit = tr.Build(g, def.root, s0);
  int terminal = g.Terminal();

  // Canonicalize, then renumber reachable states in BFS order.
  std::vector<std::vector<std::size_t>> adj(g.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    Edge& e = g.edges[i];
    e.src = g.Find(e.src);
    e.dst = g.Find(e.dst);
    adj[e.src].push_back(i);
  }
  std::vector<int> number(g.size(), -1);
  std::vector<int> order;
  std::deque<int> queue{g.Find(s0)};
  number[g.Find(s0)] = 0;
  order.push_back(g.Find(s0));
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (std::size_t ei : adj[s]) {
      int d = g.edges[ei].dst;
      if (number[d] < 0) {
        number[d] = static_cast<int>(order.size());
        order.push_back(d);
        queue.push_back(d);
      }
    }
  }
  int term_c = g.Find(terminal);
  if (number[term_c] < 0) {
    number[term_c] = static_cast<int>(order.size());
    order.push_back(term_c);
  }
  if (order.size() > opts.max_states) {
    throw ModelTooLarge("state count " + std::to_string(order.size()) +
                        " exceeds cap of " + std::to_string(opts.max_states));
  }

  Lts lts;
  lts.num_states = order.size();
  lts.initial = {0};
  lts.terminal = static_cast<StateId>(number[term_c]);
  int exit_c = g.Find(exit);
  lts.final_state = number[exit_c] >= 0 ? static_cast<StateId>(number[exit_c])
                                        : lts.terminal;

  // Emit reachable edges grouped by source in BFS order for a stable layout.
  for (int s : order) {
    for (std::size_t ei : adj[s]) {
      const Edge& e = g.edges[ei];
      Transition t;
      t.src = static_cast<StateId>(number[e.src]);
      t.dst = static_cast<StateId>(number[e.dst]);
      t.label = e.label;
      t.kind = e.kind;
      t.activity = e.activity;
      t.decision = e.decision;
      t.decision_id = e.decision_id;
      t.decision_value = e.decision_value;
      t.flow_path = e.flow_path;
      lts.transitions.push_back(std::move(t));
    }
  }
  std::set<std::pair<StateId, std::string>> fe;
  for (const auto& [s, id] : g.flow_entries) {
    int c = g.Find(s);
    if (number[c] >= 0) fe.emplace(static_cast<StateId>(number[c]), id);
  }
  lts.flow_entries.assign(fe.begin(), fe.end());

  // Compensation edges reverse each compensable forward transition.
  auto idx = IndexActivities(def);
  std::size_t n_forward = lts.transitions.size();
  std::set<StateId> fault_points;
  for (TransitionId i = 0; i < n_forward; ++i) {
    const Transition& f = lts.transitions[i];
    if (f.kind != TransitionKind::kForward) continue;
    const Activity* a = idx.at(f.activity);
    const auto* inv = a->as<Invoke>();
    if (!inv) continue;
    fault_points.insert(f.src);
    if (inv->comp_op) {
      Transition c;
      c.src = f.dst;
      c.dst = f.src;
      c.label = *inv->comp_op;
      c.kind = TransitionKind::kCompensation;
      c.activity = f.activity;
      c.reverses = i;
      lts.transitions.push_back(std::move(c));
    }
  }

  // TER edges: faults may be injected before any partner call, and normal
  // completion emits TER from the final state.
  if (lts.final_state != lts.terminal) fault_points.insert(lts.final_state);
  std::set<StateId> has_ter;
  for (const auto& t : lts.transitions) {
    if (t.kind == TransitionKind::kTermination) has_ter.insert(t.src);
  }
  for (StateId s : fault_points) {
    if (has_ter.count(s)) continue;
    Transition t;
    t.src = s;
    t.dst = lts.terminal;
    t.label = kTer;
    t.kind = TransitionKind::kTermination;
    lts.transitions.push_back(std::move(t));
  }
  lts.rebuild_index();
  return lts;
}

Lts identify_change_states(Lts lts, const WorkflowDef& def) {
  auto idx = IndexActivities(def);
  lts.change_states.clear();
  for (const auto& t : lts.transitions) {
    if (t.kind == TransitionKind::kForward && t.decision == DecisionKind::kPick) {
      lts.change_states.emplace(
          t.src, ChangeInfo{ChangeKind::kPickEntry, t.decision_id, ""});
    }
  }
  for (const auto& [s, id] : lts.flow_entries) {
    lts.change_states.emplace(s, ChangeInfo{ChangeKind::kFlowEntry, id, ""});
  }
  for (const auto& t : lts.transitions) {
    if (t.kind != TransitionKind::kForward) continue;
    const auto* inv = idx.at(t.activity)->as<Invoke>();
    if (inv && !inv->idempotent) {
      lts.change_states.emplace(
          t.src, ChangeInfo{ChangeKind::kNonIdemInvoke, t.activity, inv->op});
    }
  }
  return lts;
}

Lts build_model(const WorkflowDef& def, const TranslateOptions& opts) {
  return identify_change_states(translate(def, opts), def);
}

const char* to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::kForward:
      return "forward";
    case TransitionKind::kCompensation:
      return "compensation";
    case TransitionKind::kTermination:
      return "termination";
  }
  return "?";
}

const char* to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::kPickEntry:
      return "PickEntry";
    case ChangeKind::kFlowEntry:
      return "FlowEntry";
    case ChangeKind::kNonIdemInvoke:
      return "NonIdemInvoke";
  }
  return "?";
}

LtsStats stats(const Lts& lts) {
  LtsStats s;
  s.states = lts.num_states;
  s.forward = lts.forward_count();
  s.transitions = lts.transitions.size();
  s.labels = lts.labels.size();
  s.change_states = lts.change_states.size();
  return s;
}

}  // namespace compass
