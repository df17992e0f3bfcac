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

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "compass/errors.hpp"
#include "compass/lts.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace compass;

namespace {

Lts model_of(const std::string& body, const TranslateOptions& opts = {}) {
  return build_model(parse_workflow("workflow W { var x; " + body + " }"), opts);
}

std::string locals(const std::string& prefix, int n) {
  std::string s = "seq {";
  for (int i = 0; i < n; ++i) {
    s += " local " + prefix + std::to_string(i) + "(in=x, out=x)";
  }
  return s + " }";
}

// Number of forward paths from the initial state to `to`.
std::size_t count_paths(const Lts& lts, StateId to) {
  std::map<StateId, std::size_t> memo;
  std::function<std::size_t(StateId)> go = [&](StateId s) -> std::size_t {
    if (s == to) return 1;
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    std::size_t n = 0;
    for (TransitionId t : lts.forward_out(s)) n += go(lts.transitions[t].dst);
    return memo[s] = n;
  };
  return go(lts.initial.at(0));
}

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("sequences are linear") {
  for (int n = 1; n <= 6; ++n) {
    Lts lts = model_of(locals("a", n));
    CHECK(lts.forward_count() == static_cast<std::size_t>(n));
    CHECK(count_paths(lts, lts.final_state) == 1);
    CHECK(lts.change_states.empty());
  }
}

TEST_CASE("flows interleave their branches") {
  for (int l1 = 1; l1 <= 4; ++l1) {
    for (int l2 = 1; l2 <= 4; ++l2) {
      Lts lts = model_of("flow f { " + locals("a", l1) + " " + locals("b", l2) + " }");
      CAPTURE(l1);
      CAPTURE(l2);
      std::size_t forward = l1 * (l2 + 1) + l2 * (l1 + 1);
      CHECK(lts.forward_count() == forward);
      CHECK(count_paths(lts, lts.final_state) == binom(l1 + l2, l1));
      REQUIRE(lts.change_states.size() == 1);
      CHECK(lts.change_states.begin()->second.kind == ChangeKind::kFlowEntry);
      for (const auto& t : lts.transitions) {
        if (t.kind != TransitionKind::kForward) continue;
        REQUIRE(t.flow_path.size() == 1);
        CHECK(t.flow_path[0].first == "f");
        CHECK(t.label[0] == (t.flow_path[0].second == 0 ? 'a' : 'b'));
      }
    }
  }
}

TEST_CASE("three-way flow path count is multinomial") {
  Lts lts = model_of("flow f { " + locals("a", 2) + " " + locals("b", 2) + " " +
                     locals("c", 1) + " }");
  CHECK(count_paths(lts, lts.final_state) == 30);  // 5! / (2! 2! 1!)
  CHECK(lts.num_states >= 18);                     // 3 * 3 * 2 interleaving states
}

TEST_CASE("decisions") {
  Lts pick = model_of(
      "pick p { on e1: local a(in=x, out=x) on e2: local b(in=x, out=x) "
      "on e3: local c(in=x, out=x) }");
  CHECK(count_paths(pick, pick.final_state) == 3);
  std::size_t picks = 0;
  for (const auto& t : pick.transitions) {
    if (t.decision == DecisionKind::kPick) {
      ++picks;
      CHECK(t.decision_id == "p");
      CHECK(t.decision_value == t.label);
    }
  }
  CHECK(picks == 3);

  Lts branch = model_of(
      "if c (x) local a(in=x, out=x) else local b(in=x, out=x)");
  CHECK(count_paths(branch, branch.final_state) == 2);
  std::set<std::string> labels(branch.labels.begin(), branch.labels.end());
  CHECK(labels.count("c.true"));
  CHECK(labels.count("c.false"));

  for (int k = 0; k <= 4; ++k) {
    Lts loop = model_of("while w (x) max " + std::to_string(k) +
                        " local a(in=x, out=x)");
    CHECK(count_paths(loop, loop.final_state) == static_cast<std::size_t>(k + 1));
  }
}

TEST_CASE("compensation and termination edges") {
  Lts lts = model_of(
      "seq { invoke P.a(in=x, out=x) nonidem comp P.ca "
      "invoke P.b(in=x, out=x) local c(in=x, out=x) }");
  std::size_t comps = 0, ters = 0;
  for (TransitionId i = 0; i < lts.transitions.size(); ++i) {
    const Transition& t = lts.transitions[i];
    if (t.kind == TransitionKind::kCompensation) {
      ++comps;
      REQUIRE(t.reverses.has_value());
      const Transition& f = lts.transitions[*t.reverses];
      CHECK(f.kind == TransitionKind::kForward);
      CHECK(f.src == t.dst);
      CHECK(f.dst == t.src);
      CHECK(t.label == "ca");
    }
    if (t.kind == TransitionKind::kTermination) {
      ++ters;
      CHECK(t.dst == lts.terminal);
      CHECK(t.label == kTer);
    }
  }
  CHECK(comps == 1);
  // before each invoke and at normal completion
  CHECK(ters == 3);
  CHECK(lts.change_states.size() == 1);
  CHECK(lts.change_states.begin()->second.op == "a");
}

TEST_CASE("terminate activity jumps to the terminal state") {
  Lts lts = model_of("seq { local a(in=x, out=x) terminate }");
  bool found = false;
  for (const auto& t : lts.transitions) {
    if (t.kind == TransitionKind::kTermination) {
      found = true;
      CHECK(t.dst == lts.terminal);
    }
  }
  CHECK(found);
}

TEST_CASE("state cap") {
  std::string big = "flow f {";
  for (int i = 0; i < 6; ++i) big += " " + locals("l" + std::to_string(i) + "_", 5);
  big += " }";
  TranslateOptions opts;
  opts.max_states = 1000;
  CHECK_THROWS_AS(model_of(big, opts), ModelTooLarge);
}

TEST_CASE("travel booking model") {
  const Lts& lts = *testing::tbs().lts;
  LtsStats s = stats(lts);
  CHECK(s.states == 56);
  CHECK(s.forward == 86);
  CHECK(s.transitions == 151);
  CHECK(s.labels == 41);
  CHECK(s.change_states == 37);
  CHECK(std::is_sorted(lts.labels.begin(), lts.labels.end()));
  CHECK(std::adjacent_find(lts.labels.begin(), lts.labels.end()) == lts.labels.end());
  // the out index covers every transition exactly once
  std::size_t indexed = 0;
  for (StateId q = 0; q < lts.num_states; ++q) {
    for (TransitionId t : lts.out[q]) {
      CHECK(lts.transitions[t].src == q);
      ++indexed;
    }
  }
  CHECK(indexed == lts.transitions.size());
  // every change state refers to an activity of the right type
  for (const auto& [q, info] : lts.change_states) {
    const Activity* a = find_activity(testing::tbs().def, info.activity);
    REQUIRE(a != nullptr);
    switch (info.kind) {
      case ChangeKind::kPickEntry:
        CHECK(a->as<Pick>() != nullptr);
        break;
      case ChangeKind::kFlowEntry:
        CHECK(a->as<Flow>() != nullptr);
        break;
      case ChangeKind::kNonIdemInvoke:
        REQUIRE(a->as<Invoke>() != nullptr);
        CHECK_FALSE(a->as<Invoke>()->idempotent);
        break;
    }
  }
}
