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

#include "compass/random_model.hpp"

#include <string>

namespace compass {

namespace {

const char* const kPool[] = {"a", "b", "c", "d", "g"};

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

}  // namespace

Lts random_lts(std::mt19937_64& rng, const RandomLtsOptions& opts) {
  const std::size_t total = pick(rng, std::max<std::size_t>(opts.min_states, 3),
                                 std::max<std::size_t>(opts.max_states, 3));
  const std::size_t n = total - 1;  // workflow states; the last is terminal
  Lts lts;
  lts.num_states = total;
  lts.initial = {0};
  lts.final_state = n - 1;
  lts.terminal = n;
  auto label = [&] { return std::string(kPool[pick(rng, 0, 4)]); };
  auto add_forward = [&](StateId s, StateId d) {
    Transition t;
    t.src = s;
    t.dst = d;
    t.label = label();
    t.activity = "act" + std::to_string(lts.transitions.size());
    lts.transitions.push_back(t);
  };
  for (StateId s = 0; s + 1 < n; ++s) {
    add_forward(s, pick(rng, s + 1, n - 1));
    std::size_t extra = pick(rng, 0, 2);
    for (std::size_t i = 0; i < extra; ++i) {
      StateId d = coin(rng, opts.back_edge_prob) ? pick(rng, 0, s)
                                                 : pick(rng, s + 1, n - 1);
      add_forward(s, d);
    }
  }
  const std::size_t forward = lts.transitions.size();
  for (TransitionId i = 0; i < forward; ++i) {
    if (!coin(rng, opts.comp_prob)) continue;
    Transition c;
    c.src = lts.transitions[i].dst;
    c.dst = lts.transitions[i].src;
    c.label = "undo_" + lts.transitions[i].label;
    c.kind = TransitionKind::kCompensation;
    c.activity = lts.transitions[i].activity;
    c.reverses = i;
    lts.transitions.push_back(c);
  }
  Transition ter;
  ter.src = lts.final_state;
  ter.dst = lts.terminal;
  ter.label = kTer;
  ter.kind = TransitionKind::kTermination;
  lts.transitions.push_back(ter);
  for (StateId s = 0; s < n; ++s) {
    if (coin(rng, opts.change_prob)) {
      lts.change_states[s] = ChangeInfo{ChangeKind::kNonIdemInvoke,
                                        "act", "op" + std::to_string(s)};
    }
  }
  lts.rebuild_index();
  return lts;
}

std::vector<Monitor> random_model_monitors() {
  PropertySpec live;
  live.name = "L";
  live.kind = PropertyKind::kLiveness;
  live.pattern = PatternKind::kResponse;
  live.first = {"a"};
  live.second = {"g"};

  PropertySpec s1;
  s1.name = "S1";
  s1.kind = PropertyKind::kSafety;
  s1.pattern = PatternKind::kAbsence;
  s1.first = {"c"};
  s1.scope = ScopeKind::kAfter;
  s1.scope_events = {"b"};

  PropertySpec s2;
  s2.name = "S2";
  s2.kind = PropertyKind::kSafety;
  s2.pattern = PatternKind::kPrecedence;
  s2.first = {"b"};
  s2.second = {"d"};
  return {compile(live), compile(s1), compile(s2)};
}

PlanningProblem random_liveness_problem(std::mt19937_64& rng,
                                        std::shared_ptr<const Lts> lts,
                                        std::size_t k, std::size_t max_trace) {
  PlanningProblem p;
  p.violated = random_model_monitors().front();
  p.kind = PropertyKind::kLiveness;
  p.monitor_index = 0;
  p.k = k;
  ExecutionTrace& tr = p.trace;
  StateId s = lts->initial.front();
  MonitorState q = p.violated.initial;
  tr.states.push_back(s);
  tr.snapshots.push_back({q});
  const std::size_t len = pick(rng, 0, max_trace);
  for (std::size_t i = 0; i < len; ++i) {
    auto out = lts->forward_out(s);
    if (out.empty()) break;
    TransitionId t = out[pick(rng, 0, out.size() - 1)];
    s = lts->transitions[t].dst;
    q = step(p.violated, q, lts->transitions[t].label);
    tr.steps.push_back(t);
    tr.states.push_back(s);
    tr.snapshots.push_back({q});
  }
  for (StateId v : tr.states) {
    if (coin(rng, 0.6)) p.candidates.insert(v);
  }
  p.lts = std::move(lts);
  return p;
}

}  // namespace compass
