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

#include "compass/engine.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "compass/errors.hpp"

namespace compass {

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string s; words >> s;) w.push_back(s);
    if (w.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw SyntaxError(lineno, 1, msg);
    };
    const std::string& d = w[0];
    if (d == "scenario" && w.size() == 2) {
      sc.name = w[1];
    } else if (d == "choice" && w.size() == 2) {
      sc.choices.push_back(w[1]);
    } else if (d == "branch" && w.size() == 3) {
      if (w[2] != "true" && w[2] != "false") fail("branch value must be true|false");
      sc.branches[w[1]].push_back(w[2] == "true");
    } else if (d == "interleave" && w.size() == 3) {
      std::stringstream ss(w[2]);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          sc.interleave[w[1]].push_back(std::stoi(item));
        } catch (const std::exception&) {
          fail("bad branch index '" + item + "'");
        }
      }
    } else if (d == "inject" && w.size() == 4 && w[1] == kTer && w[2] == "at") {
      sc.inject_ter_at.push_back(w[3]);
    } else if (d == "outcome" && w.size() == 3) {
      sc.partner_outcomes[w[1]].push_back(w[2]);
    } else {
      fail("unrecognized directive '" + line + "'");
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::vector<std::string> ExecutionTrace::events(const Lts& lts) const {
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (TransitionId t : steps) out.push_back(lts.transitions[t].label);
  return out;
}

MonitorVector snapshot_at(const ExecutionTrace& trace, StateId state) {
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    if (trace.states[i] == state) return trace.snapshots[i];
  }
  throw NotOnTrace("state " + std::to_string(state) + " is not on the trace");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kRunning:
      return "running";
    case RunStatus::kAwaitingChoice:
      return "awaiting-choice";
    case RunStatus::kViolated:
      return "violated";
    case RunStatus::kCompleted:
      return "completed";
  }
  return "?";
}

Run::Run(std::shared_ptr<const Lts> lts,
         std::shared_ptr<const std::vector<Monitor>> monitors,
         Scenario scenario)
    : lts_(std::move(lts)),
      monitors_(std::move(monitors)),
      scenario_(std::move(scenario)) {
  current_ = lts_->initial.empty() ? 0 : lts_->initial.front();
  for (const auto& m : *monitors_) monitors_now_.push_back(m.initial);
  trace_.states.push_back(current_);
  trace_.snapshots.push_back(monitors_now_);
}

bool Run::Deliver(const std::string& event, TransitionKind kind,
                  std::string outcome) {
  MonitorVector next(monitors_now_.size());
  for (std::size_t i = 0; i < monitors_->size(); ++i) {
    const Monitor& m = (*monitors_)[i];
    next[i] = step(m, monitors_now_[i], event);
    if (m.is_red(next[i]) && !m.is_red(monitors_now_[i])) {
      violation_ = ViolationReport{m.name,  m.kind, i, current_,
                                   event,   trace_.length()};
      status_ = RunStatus::kViolated;
      return false;
    }
  }
  monitors_now_ = std::move(next);
  log_.push_back({current_, event, kind, monitors_now_, std::move(outcome)});
  return true;
}

bool Run::Fire(TransitionId id) {
  const Transition& t = lts_->transitions.at(id);
  if (t.src != current_ || t.kind != TransitionKind::kForward) {
    throw Error("InvalidTransition", "transition '" + t.label +
                                         "' is not enabled in state " +
                                         std::to_string(current_));
  }
  std::string outcome;
  if (auto it = scenario_.partner_outcomes.find(t.label);
      it != scenario_.partner_outcomes.end() && !it->second.empty()) {
    outcome = it->second.front();
    it->second.pop_front();
  }
  if (!Deliver(t.label, TransitionKind::kForward, std::move(outcome))) {
    return false;
  }
  current_ = t.dst;
  trace_.steps.push_back(id);
  trace_.states.push_back(current_);
  trace_.snapshots.push_back(monitors_now_);
  return true;
}

void Run::Undo() {
  if (trace_.steps.empty()) {
    throw Error("InvalidUndo", "nothing to compensate");
  }
  TransitionId fwd = trace_.steps.back();
  std::string label(kNoopCompensation);
  for (TransitionId c : lts_->out[current_]) {
    const Transition& ct = lts_->transitions[c];
    if (ct.kind == TransitionKind::kCompensation && ct.reverses == fwd) {
      label = ct.label;
      break;
    }
  }
  trace_.steps.pop_back();
  trace_.states.pop_back();
  trace_.snapshots.pop_back();
  StateId from = current_;
  current_ = trace_.states.back();
  monitors_now_ = trace_.snapshots.back();
  log_.push_back({from, label, TransitionKind::kCompensation, monitors_now_, {}});
}

void Run::Resume() {
  violation_.reset();
  pending_.clear();
  status_ = RunStatus::kRunning;
}

void Run::Complete() {
  if (Deliver(kTer, TransitionKind::kTermination)) {
    status_ = RunStatus::kCompleted;
  }
}

std::optional<TransitionId> Run::Choose(std::vector<TransitionId> cand) {
  const auto& T = lts_->transitions;
  auto labels_of = [&](const std::vector<TransitionId>& ids) {
    std::vector<std::string> ls;
    for (auto i : ids) ls.push_back(T[i].label);
    return ls;
  };
  if (answer_) {
    std::string a = *answer_;
    answer_.reset();
    for (auto i : cand) {
      if (T[i].label == a) return i;
    }
    throw ScriptMismatch("answer '" + a + "' is not enabled");
  }
  // Flow interleaving decisions, outermost flow first.
  for (std::size_t level = 0; cand.size() > 1; ++level) {
    bool common = std::all_of(cand.begin(), cand.end(), [&](auto i) {
      return T[i].flow_path.size() > level &&
             T[i].flow_path[level].first == T[cand[0]].flow_path[level].first;
    });
    if (!common) break;
    const std::string& flow = T[cand[0]].flow_path[level].first;
    bool diverges = std::any_of(cand.begin(), cand.end(), [&](auto i) {
      return T[i].flow_path[level].second != T[cand[0]].flow_path[level].second;
    });
    if (!diverges) continue;
    auto& q = scenario_.interleave[flow];
    if (q.empty()) {
      pending_ = labels_of(cand);
      return std::nullopt;
    }
    int branch = q.front();
    q.pop_front();
    std::vector<TransitionId> kept;
    for (auto i : cand) {
      if (T[i].flow_path[level].second == branch) kept.push_back(i);
    }
    if (kept.empty()) {
      throw ScriptMismatch("flow '" + flow + "' branch " +
                           std::to_string(branch) + " is not enabled");
    }
    cand = std::move(kept);
  }
  if (cand.size() == 1) return cand.front();

  const Transition& first = T[cand.front()];
  if (first.decision == DecisionKind::kPick) {
    if (scenario_.choices.empty()) {
      pending_ = labels_of(cand);
      return std::nullopt;
    }
    std::string c = scenario_.choices.front();
    scenario_.choices.pop_front();
    for (auto i : cand) {
      if (T[i].label == c) return i;
    }
    throw ScriptMismatch("choice '" + c + "' is not a branch of pick '" +
                         first.decision_id + "'");
  }
  if (first.decision == DecisionKind::kBranch) {
    auto& q = scenario_.branches[first.decision_id];
    if (q.empty()) {
      pending_ = labels_of(cand);
      return std::nullopt;
    }
    std::string v = q.front() ? "true" : "false";
    q.pop_front();
    for (auto i : cand) {
      if (T[i].decision_value == v) return i;
    }
    throw ScriptMismatch("branch '" + first.decision_id + "' cannot be " + v +
                         " here");
  }
  pending_ = labels_of(cand);
  return std::nullopt;
}

RunStatus Run::Advance() {
  if (status_ == RunStatus::kViolated || status_ == RunStatus::kCompleted) {
    return status_;
  }
  status_ = RunStatus::kRunning;
  while (true) {
    if (current_ == lts_->terminal) {
      status_ = RunStatus::kCompleted;
      return status_;
    }
    std::vector<TransitionId> enabled = lts_->forward_out(current_);
    if (enabled.empty()) {
      if (current_ != lts_->final_state) {
        throw Deadlock("no enabled transition in state " +
                       std::to_string(current_));
      }
      Complete();
      return status_;
    }
    std::optional<TransitionId> chosen = Choose(std::move(enabled));
    if (!chosen) {
      status_ = RunStatus::kAwaitingChoice;
      return status_;
    }
    const std::string& label = lts_->transitions[*chosen].label;
    auto inj = std::find(scenario_.inject_ter_at.begin(),
                         scenario_.inject_ter_at.end(), label);
    if (inj != scenario_.inject_ter_at.end()) {
      scenario_.inject_ter_at.erase(inj);
      if (!Deliver(kTer, TransitionKind::kTermination)) return status_;
      fault_terminated_ = true;
      current_ = lts_->terminal;
      status_ = RunStatus::kCompleted;
      return status_;
    }
    if (!Fire(*chosen)) return status_;
  }
}

RunStatus Run::Answer(const std::string& label) {
  if (status_ != RunStatus::kAwaitingChoice) {
    throw ScriptMismatch("run is not awaiting a choice");
  }
  if (std::find(pending_.begin(), pending_.end(), label) == pending_.end()) {
    throw ScriptMismatch("'" + label + "' is not among the pending choices");
  }
  answer_ = label;
  pending_.clear();
  status_ = RunStatus::kRunning;
  return Advance();
}

RunResult run(std::shared_ptr<const Lts> lts,
              std::shared_ptr<const std::vector<Monitor>> monitors,
              const Scenario& scenario) {
  Run r(std::move(lts), std::move(monitors), scenario);
  r.Advance();
  return RunResult{r.status(), r.trace(), r.violation(), r.pending_choices()};
}

}  // namespace compass
