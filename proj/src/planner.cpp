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

#include "compass/planner.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <tuple>

#include "compass/errors.hpp"

namespace compass {

namespace {

std::string undo_label(const Lts& lts, TransitionId fwd) {
  const Transition& f = lts.transitions[fwd];
  for (TransitionId c : lts.out[f.dst]) {
    const Transition& ct = lts.transitions[c];
    if (ct.kind == TransitionKind::kCompensation && ct.reverses == fwd) {
      return ct.label;
    }
  }
  return std::string(kNoopCompensation);
}

// Fills undo steps, metrics and origin for a plan that undoes `j` steps.
Plan make_plan(const PlanningProblem& p, std::size_t j,
               std::vector<TransitionId> redo) {
  const Lts& lts = *p.lts;
  const std::size_t L = p.trace.length();
  Plan plan;
  for (std::size_t t = 0; t < j; ++t) {
    TransitionId fwd = p.trace.steps[L - 1 - t];
    UndoStep u{fwd, undo_label(lts, fwd)};
    if (u.label != kNoopCompensation) ++plan.compensation_count;
    plan.undo.push_back(std::move(u));
  }
  plan.change_index = L - j;
  plan.change_state = p.trace.states[L - j];
  plan.redo = std::move(redo);
  plan.origin_length = L;
  plan.origin_state = p.trace.states.back();
  plan.total_length = plan.undo.size() + plan.redo.size();
  return plan;
}

bool is_goal_link(const Monitor& m, MonitorState q, const std::string& label) {
  return !m.is_green(q) && m.is_green(step(m, q, label));
}

class Builder {
 public:
  Builder(CnfInstance& cnf, const EncodeLimits& limits)
      : cnf_(cnf), limits_(limits) {}

  int var() {
    if (static_cast<std::size_t>(cnf_.num_vars) >= limits_.max_vars) {
      throw EncodingTooLarge("encoding exceeds " +
                             std::to_string(limits_.max_vars) + " variables");
    }
    return ++cnf_.num_vars;
  }

  void add(Clause c) {
    if (cnf_.clauses.size() >= limits_.max_clauses) {
      throw EncodingTooLarge("encoding exceeds " +
                             std::to_string(limits_.max_clauses) + " clauses");
    }
    cnf_.clauses.push_back(std::move(c));
  }

  void at_most_one(const std::vector<int>& xs) {
    if (xs.size() <= 5) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) add({-xs[i], -xs[j]});
      }
      return;
    }
    // Sequential counter.
    int prev = var();
    add({-xs[0], prev});
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      int s = var();
      add({-xs[i], s});
      add({-prev, s});
      add({-xs[i], -prev});
      prev = s;
    }
    add({-xs.back(), -prev});
  }

  void exactly_one(const std::vector<int>& xs) {
    add(Clause(xs.begin(), xs.end()));
    at_most_one(xs);
  }

 private:
  CnfInstance& cnf_;
  const EncodeLimits& limits_;
};

}  // namespace

std::vector<std::string> Plan::redo_labels(const Lts& lts) const {
  std::vector<std::string> out;
  for (TransitionId t : redo) out.push_back(lts.transitions[t].label);
  return out;
}

std::vector<std::string> Plan::labels(const Lts& lts) const {
  std::vector<std::string> out;
  for (const auto& u : undo) out.push_back(u.label);
  for (TransitionId t : redo) out.push_back(lts.transitions[t].label);
  return out;
}

std::vector<std::size_t> plan_key(const Plan& p) {
  std::vector<std::size_t> key{p.undo.size()};
  key.insert(key.end(), p.redo.begin(), p.redo.end());
  return key;
}

PlanningProblem make_problem(std::shared_ptr<const Lts> lts,
                             const std::vector<Monitor>& monitors,
                             const ExecutionTrace& trace,
                             const ViolationReport& violation,
                             std::set<StateId> candidates, std::size_t k,
                             std::size_t n) {
  if (k < 1) throw Error("InvalidArgument", "k must be at least 1");
  PlanningProblem p;
  p.lts = std::move(lts);
  p.trace = trace;
  p.candidates = std::move(candidates);
  p.kind = violation.kind;
  p.monitor_index = violation.monitor_index;
  p.violated = monitors.at(p.monitor_index);
  p.k = k;
  p.n = n;
  return p;
}

PlanningProblem make_problem(const Run& run, std::set<StateId> candidates,
                             std::size_t k, std::size_t n) {
  if (!run.violation()) {
    throw Error("NoViolation", "the run has no intercepted violation");
  }
  return make_problem(run.lts_ptr(), run.monitors(), run.trace(),
                      *run.violation(), std::move(candidates), k, n);
}

std::vector<Plan> safety_plans(const PlanningProblem& problem) {
  std::vector<Plan> plans;
  const std::size_t L = problem.trace.length();
  for (std::size_t j = 1; j <= std::min(problem.k, L); ++j) {
    if (!problem.candidates.count(problem.trace.states[L - j])) continue;
    Plan p = make_plan(problem, j, {});
    p.discovery_index = plans.size();
    plans.push_back(std::move(p));
    if (problem.n && plans.size() >= problem.n) break;
  }
  return plans;
}

Encoding encode(const PlanningProblem& problem, const EncodeLimits& limits) {
  const Lts& lts = *problem.lts;
  const Monitor& mon = problem.violated;
  const ExecutionTrace& tr = problem.trace;
  const std::size_t k = problem.k;
  const std::size_t L = tr.length();
  const std::size_t S = lts.num_states;
  const std::size_t Q = mon.num_states;

  Encoding enc;
  enc.k = k;
  enc.trace_length = L;
  for (TransitionId t = 0; t < lts.transitions.size(); ++t) {
    if (lts.transitions[t].kind == TransitionKind::kForward) {
      enc.forward.push_back(t);
    }
  }
  const std::size_t E = enc.forward.size();
  Builder b(enc.cnf, limits);

  std::vector<std::vector<int>> x(k + 1, std::vector<int>(S));
  std::vector<std::vector<int>> m(k + 1, std::vector<int>(Q));
  std::vector<int> done(k + 1), goal(k, 0);
  enc.undo_var.assign(k, 0);
  enc.noop_var.assign(k, 0);
  enc.act_var.assign(k, std::vector<int>(E, 0));

  // Time-major allocation keeps the solver's ascending decision order
  // aligned with plan steps.
  for (std::size_t t = 0; t <= k; ++t) {
    done[t] = b.var();
    for (auto& v : x[t]) v = b.var();
    for (auto& v : m[t]) v = b.var();
    if (t == k) break;
    if (t < L) enc.undo_var[t] = b.var();
    for (auto& v : enc.act_var[t]) v = b.var();
    enc.noop_var[t] = b.var();
    goal[t] = b.var();
  }

  // Initial state.
  const StateId err = tr.states.back();
  for (StateId s = 0; s < S; ++s) b.add({s == err ? x[0][s] : -x[0][s]});
  b.add({-done[0]});
  b.add({done[k]});

  const std::size_t max_undo = std::min(k, L);
  // Undo is a contiguous prefix reversing the trace suffix.
  for (std::size_t t = 0; t < max_undo; ++t) {
    int u = enc.undo_var[t];
    if (t + 1 < max_undo) b.add({-enc.undo_var[t + 1], u});
    b.add({-u, x[t][tr.states[L - t]]});
    b.add({-u, x[t + 1][tr.states[L - 1 - t]]});
  }

  // Endpoint of the undo prefix: must be a candidate change state, and seeds
  // the violated monitor with its snapshot there.
  for (std::size_t j = 0; j <= max_undo; ++j) {
    int e = b.var();
    int u_here = j < max_undo ? enc.undo_var[j] : 0;
    int u_prev = j > 0 ? enc.undo_var[j - 1] : 0;
    if (u_here) b.add({-e, -u_here});
    if (u_prev) b.add({-e, u_prev});
    Clause def{e};
    if (u_here) def.push_back(u_here);
    if (u_prev) def.push_back(-u_prev);
    b.add(def);
    if (!problem.candidates.count(tr.states[L - j])) {
      b.add({-e});
      continue;
    }
    MonitorState q0 = tr.snapshots[L - j].at(problem.monitor_index);
    b.add({-e, m[j][q0]});
  }

  for (std::size_t t = 0; t < k; ++t) {
    std::vector<int> acts;
    if (enc.undo_var[t]) acts.push_back(enc.undo_var[t]);
    for (int a : enc.act_var[t]) acts.push_back(a);
    acts.push_back(enc.noop_var[t]);
    b.exactly_one(acts);

    b.add({-enc.noop_var[t], done[t]});
    b.add({enc.noop_var[t], -done[t]});

    // Incoming actions per state, for explanatory frame axioms.
    std::vector<std::vector<int>> into(S);
    if (enc.undo_var[t]) into[tr.states[L - 1 - t]].push_back(enc.undo_var[t]);
    for (std::size_t i = 0; i < E; ++i) {
      const Transition& tt = lts.transitions[enc.forward[i]];
      int a = enc.act_var[t][i];
      b.add({-a, x[t][tt.src]});
      b.add({-a, x[t + 1][tt.dst]});
      into[tt.dst].push_back(a);
      for (MonitorState q = 0; q < Q; ++q) {
        b.add({-a, -m[t][q], m[t + 1][step(mon, q, tt.label)]});
      }
    }
    for (StateId s = 0; s < S; ++s) {
      Clause stay{-x[t + 1][s], x[t][s]};
      Clause idle{-x[t + 1][s], enc.noop_var[t]};
      for (int a : into[s]) {
        stay.push_back(a);
        idle.push_back(a);
      }
      b.add(stay);
      b.add(idle);
      b.add({-enc.noop_var[t], -x[t][s], x[t + 1][s]});
    }

    // Goal: a forward action that moves the monitor into green.
    Clause why{-goal[t]};
    for (std::size_t i = 0; i < E; ++i) {
      const std::string& label = lts.transitions[enc.forward[i]].label;
      for (MonitorState q = 0; q < Q; ++q) {
        if (!is_goal_link(mon, q, label)) continue;
        int a = enc.act_var[t][i];
        int pair = b.var();
        b.add({-pair, a});
        b.add({-pair, m[t][q]});
        b.add({-a, -m[t][q], pair});
        why.push_back(pair);
        b.add({-pair, goal[t]});
      }
    }
    b.add(why);
    b.add({-done[t + 1], done[t], goal[t]});
    b.add({done[t + 1], -done[t]});
    b.add({done[t + 1], -goal[t]});
  }
  for (std::size_t t = 0; t <= k; ++t) b.at_most_one(m[t]);
  return enc;
}

Plan decode(const Encoding& enc, const SatModel& model,
            const PlanningProblem& problem) {
  std::size_t j = 0;
  while (j < enc.k && enc.undo_var[j] && model.value(enc.undo_var[j])) ++j;
  std::vector<TransitionId> redo;
  for (std::size_t t = j; t < enc.k; ++t) {
    if (model.value(enc.noop_var[t])) break;
    for (std::size_t i = 0; i < enc.forward.size(); ++i) {
      if (model.value(enc.act_var[t][i])) {
        redo.push_back(enc.forward[i]);
        break;
      }
    }
  }
  return make_plan(problem, j, std::move(redo));
}

std::vector<Plan> enumerate(const PlanningProblem& problem,
                            const EnumerateOptions& opts, PlanStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  Encoding enc = encode(problem, opts.encode_limits);
  Solver solver(enc.cnf.num_vars);
  for (const Clause& c : enc.cnf.clauses) solver.add_clause(c);
  std::vector<Plan> plans;
  while (!(problem.n && plans.size() >= problem.n) &&
         solver.solve(opts.solve_limits)) {
    Plan p = decode(enc, solver.model(), problem);
    Clause block;
    for (std::size_t t = 0; t < p.undo.size(); ++t) {
      block.push_back(-enc.undo_var[t]);
    }
    for (std::size_t r = 0; r < p.redo.size(); ++r) {
      std::size_t t = p.undo.size() + r;
      auto it = std::find(enc.forward.begin(), enc.forward.end(), p.redo[r]);
      block.push_back(-enc.act_var[t][it - enc.forward.begin()]);
    }
    if (opts.blocking_hook) opts.blocking_hook(block);
    p.discovery_index = plans.size();
    plans.push_back(std::move(p));
    solver.add_clause(block);
  }
  if (stats) {
    stats->vars = static_cast<std::size_t>(enc.cnf.num_vars);
    stats->clauses = enc.cnf.clauses.size();
    stats->candidates = problem.candidates.size();
    stats->plans = plans.size();
    stats->seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return plans;
}

std::vector<Plan> dfs_plans(const PlanningProblem& problem) {
  const Lts& lts = *problem.lts;
  const Monitor& mon = problem.violated;
  const std::size_t L = problem.trace.length();
  std::vector<Plan> plans;
  std::vector<TransitionId> path;
  for (std::size_t j = 0; j <= std::min(problem.k, L); ++j) {
    StateId c = problem.trace.states[L - j];
    if (!problem.candidates.count(c)) continue;
    MonitorState q0 = problem.trace.snapshots[L - j].at(problem.monitor_index);
    std::function<void(StateId, MonitorState, std::size_t)> go =
        [&](StateId s, MonitorState q, std::size_t budget) {
          if (budget == 0) return;
          for (TransitionId t : lts.forward_out(s)) {
            const Transition& tt = lts.transitions[t];
            path.push_back(t);
            if (is_goal_link(mon, q, tt.label)) {
              Plan p = make_plan(problem, j, path);
              p.discovery_index = plans.size();
              plans.push_back(std::move(p));
            } else {
              go(tt.dst, step(mon, q, tt.label), budget - 1);
            }
            path.pop_back();
          }
        };
    go(c, q0, problem.k - j);
  }
  return plans;
}

std::vector<Plan> rank(std::vector<Plan> plans) {
  std::stable_sort(plans.begin(), plans.end(),
                   [](const Plan& a, const Plan& b) {
                     return std::tie(a.total_length, a.compensation_count,
                                     a.discovery_index) <
                            std::tie(b.total_length, b.compensation_count,
                                     b.discovery_index);
                   });
  return plans;
}

std::vector<Plan> generate_plans(const PlanningProblem& problem,
                                 const EnumerateOptions& opts,
                                 PlanStats* stats) {
  if (problem.kind == PropertyKind::kSafety) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Plan> plans = safety_plans(problem);
    if (stats) {
      *stats = PlanStats{};
      stats->candidates = problem.candidates.size();
      stats->plans = plans.size();
      stats->seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
    return rank(std::move(plans));
  }
  return rank(enumerate(problem, opts, stats));
}

bool forbidden_by_snapshot(const Plan& plan, const ExecutionTrace& trace,
                           const Lts& lts,
                           const std::vector<Monitor>& monitors) {
  const MonitorVector& snap = trace.snapshots.at(plan.change_index);
  for (std::size_t i = 0; i < monitors.size(); ++i) {
    const Monitor& m = monitors[i];
    if (m.kind != PropertyKind::kSafety) continue;
    MonitorState q = snap.at(i);
    for (TransitionId t : plan.redo) {
      q = step(m, q, lts.transitions[t].label);
      if (m.is_red(q)) return true;
    }
  }
  return false;
}

std::vector<std::string> validation_trace(const Plan& plan,
                                          const ExecutionTrace& trace,
                                          const Lts& lts) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < plan.change_index; ++i) {
    out.push_back(lts.transitions[trace.steps[i]].label);
  }
  for (TransitionId t : plan.redo) out.push_back(lts.transitions[t].label);
  return out;
}

bool forbidden_by_replay(const Plan& plan, const ExecutionTrace& trace,
                         const Lts& lts, const std::vector<Monitor>& monitors) {
  std::vector<std::string> tp = validation_trace(plan, trace, lts);
  for (const Monitor& m : monitors) {
    if (m.kind != PropertyKind::kSafety) continue;
    MonitorState q = m.initial;
    for (const auto& e : tp) {
      q = step(m, q, e);
      if (m.is_red(q)) return true;
    }
  }
  return false;
}

std::vector<Plan> filter_forbidden(const std::vector<Plan>& plans,
                                   const ExecutionTrace& trace, const Lts& lts,
                                   const std::vector<Monitor>& monitors) {
  std::vector<Plan> out;
  for (const Plan& p : plans) {
    if (!forbidden_by_snapshot(p, trace, lts, monitors)) out.push_back(p);
  }
  return out;
}

RunStatus execute_plan(Run& run, const Plan& plan) {
  if (run.trace().length() != plan.origin_length ||
      run.current() != plan.origin_state) {
    throw PlanInapplicable("the run has moved since the plan was computed");
  }
  const auto& steps = run.trace().steps;
  for (std::size_t i = 0; i < plan.undo.size(); ++i) {
    if (i >= steps.size() ||
        steps[steps.size() - 1 - i] != plan.undo[i].transition) {
      throw PlanInapplicable("undo step does not match the trace");
    }
  }
  run.Resume();
  for (std::size_t i = 0; i < plan.undo.size(); ++i) run.Undo();
  for (TransitionId t : plan.redo) {
    if (!run.Fire(t)) return run.status();
  }
  return run.status();
}

}  // namespace compass
