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
#include <random>
#include <set>

#include "compass/dependency.hpp"
#include "compass/errors.hpp"
#include "compass/planner.hpp"
#include "compass/random_model.hpp"
#include "doctest.h"
#include "random_runs.hpp"
#include "support.hpp"

using namespace compass;
using testing::scenario_run;
using testing::tbs;

namespace {

using KeySet = std::set<std::vector<std::size_t>>;

KeySet keys(const std::vector<Plan>& plans) {
  KeySet s;
  for (const auto& p : plans) s.insert(plan_key(p));
  return s;
}

struct Analysis {
  DefUseTable table;
  DependencyRelation rel;
};

const Analysis& tbs_analysis() {
  static const Analysis a = [] {
    Analysis x;
    x.table = build_defuse(*tbs().lts, tbs().def);
    x.rel = build_dependencies(*tbs().lts, x.table);
    return x;
  }();
  return a;
}

std::vector<Plan> plans_for(const Run& r, std::size_t k, bool relevant,
                            bool filter) {
  const auto& a = tbs_analysis();
  auto cands = relevant ? relevant_change_states(*tbs().lts, a.table, a.rel, r.trace())
                        : visited_change_states(*tbs().lts, r.trace());
  auto plans = generate_plans(make_problem(r, cands, k));
  if (filter) plans = filter_forbidden(plans, r.trace(), r.lts(), r.monitors());
  return plans;
}

bool has_plan(const std::vector<Plan>& ps, StateId change, std::size_t len) {
  return std::any_of(ps.begin(), ps.end(), [&](const Plan& p) {
    return p.change_state == change && p.total_length == len;
  });
}

}  // namespace

TEST_CASE("SAT enumeration equals explicit search") {
  std::mt19937_64 rng(3);
  std::size_t total = 0;
  for (int i = 0; i < 60; ++i) {
    auto lts = std::make_shared<const Lts>(random_lts(rng));
    for (std::size_t k = 1; k <= 8; ++k) {
      PlanningProblem p = random_liveness_problem(rng, lts, k, 6);
      auto sat = enumerate(p);
      auto dfs = dfs_plans(p);
      CHECK(keys(sat) == keys(dfs));
      CHECK(keys(sat).size() == sat.size());
      total += dfs.size();
    }
  }
  CHECK(total > 100);
}

TEST_CASE("a weakened blocking clause is caught by the oracle") {
  std::mt19937_64 rng(3);
  EnumerateOptions bad;
  bad.blocking_hook = [](Clause& c) {
    if (c.size() > 1) c.resize(1);
  };
  std::size_t differ = 0;
  for (int i = 0; i < 40; ++i) {
    auto lts = std::make_shared<const Lts>(random_lts(rng));
    for (std::size_t k = 1; k <= 8; ++k) {
      PlanningProblem p = random_liveness_problem(rng, lts, k, 6);
      differ += keys(enumerate(p, bad)) != keys(dfs_plans(p));
    }
  }
  CHECK(differ > 0);
}

TEST_CASE("plans are well formed") {
  std::mt19937_64 rng(17);
  for (auto& c : testing::random_plan_cases(rng, 60)) {
    const Lts& lts = c.run.lts();
    const auto& tr = c.run.trace();
    for (const Plan& p : generate_plans(c.problem)) {
      CHECK(p.total_length == p.undo.size() + p.redo.size());
      CHECK(p.total_length <= c.problem.k);
      CHECK(p.change_index + p.undo.size() == tr.length());
      CHECK(p.change_state == tr.states[p.change_index]);
      CHECK(c.problem.candidates.count(p.change_state));
      StateId s = p.change_state;
      MonitorState q = tr.snapshots[p.change_index][c.problem.monitor_index];
      const Monitor& m = c.problem.violated;
      bool green_reached = false;
      for (std::size_t i = 0; i < p.redo.size(); ++i) {
        const Transition& t = lts.transitions[p.redo[i]];
        CHECK(t.src == s);
        CHECK(t.kind == TransitionKind::kForward);
        s = t.dst;
        MonitorState next = step(m, q, t.label);
        // the goal is reached exactly on the final step
        green_reached = !m.is_green(q) && m.is_green(next);
        CHECK((green_reached == (i + 1 == p.redo.size())));
        q = next;
      }
      CHECK(green_reached);
    }
  }
}

TEST_CASE("filter decisions are sound and match full replay") {
  std::mt19937_64 rng(23);
  std::size_t cases = 0, plans = 0, removed = 0;
  for (auto& c : testing::random_plan_cases(rng, 150)) {
    ++cases;
    auto all = generate_plans(c.problem);
    auto kept = filter_forbidden(all, c.run.trace(), c.run.lts(), c.run.monitors());
    KeySet kept_keys = keys(kept);
    for (const Plan& p : all) {
      ++plans;
      bool snap = forbidden_by_snapshot(p, c.run.trace(), c.run.lts(), c.run.monitors());
      bool replay = forbidden_by_replay(p, c.run.trace(), c.run.lts(), c.run.monitors());
      CHECK(snap == replay);
      CHECK(kept_keys.count(plan_key(p)) == static_cast<std::size_t>(!snap));
      Run copy = c.run;
      RunStatus st = execute_plan(copy, p);
      bool safety_hit = st == RunStatus::kViolated &&
                        copy.violation()->kind == PropertyKind::kSafety;
      // surviving plans never trip a safety monitor; removed ones always do
      CHECK(safety_hit == snap);
      removed += snap;
      if (!snap) {
        CHECK(copy.trace().length() == p.change_index + p.redo.size());
        CHECK(c.run.monitors()[c.problem.monitor_index].is_green(
            copy.monitor_states()[c.problem.monitor_index]));
      }
    }
  }
  CHECK(cases >= 100);
  CHECK(plans > 100);
  CHECK(removed > 0);
}

TEST_CASE("ranking is a stable sort on length, compensations, discovery") {
  std::mt19937_64 rng(29);
  for (auto& c : testing::random_plan_cases(rng, 40)) {
    auto raw = enumerate(c.problem);
    auto ranked = rank(raw);
    auto expect = raw;
    std::stable_sort(expect.begin(), expect.end(), [](const Plan& a, const Plan& b) {
      if (a.total_length != b.total_length) return a.total_length < b.total_length;
      if (a.compensation_count != b.compensation_count) {
        return a.compensation_count < b.compensation_count;
      }
      return a.discovery_index < b.discovery_index;
    });
    REQUIRE(ranked.size() == expect.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      CHECK(plan_key(ranked[i]) == plan_key(expect[i]));
    }
    CHECK(keys(rank(ranked)) == keys(ranked));
  }
}

TEST_CASE("t1 safety plans") {
  Run r = scenario_run("t1.scn");
  std::size_t prev_base = 0, prev_rel = 0;
  for (std::size_t k = 5; k <= 30; k += 5) {
    auto base = plans_for(r, k, false, false);
    auto rel = plans_for(r, k, true, false);
    CHECK(base.size() >= prev_base);
    CHECK(rel.size() >= prev_rel);
    CHECK(rel.size() <= base.size());
    KeySet bk = keys(base);
    for (const auto& p : rel) CHECK(bk.count(plan_key(p)));
    for (const auto& p : base) {
      CHECK(p.redo.empty());
      CHECK(p.undo.size() >= 1);
    }
    prev_base = base.size();
    prev_rel = rel.size();
  }
  auto base = plans_for(r, 30, false, false);
  auto rel = plans_for(r, 30, true, false);
  CHECK(base.size() == 12);
  CHECK(rel.size() == 9);
  // the two plans leading back before the transport choice and the hold
  CHECK(has_plan(base, 3, 19));
  CHECK(has_plan(base, 1, 20));
  CHECK(has_plan(rel, 3, 19));
  CHECK(has_plan(rel, 1, 20));
}

TEST_CASE("t2 liveness plans") {
  Run r = scenario_run("t2.scn");
  const Lts& lts = r.lts();
  auto k10 = plans_for(r, 10, false, false);
  CHECK(k10.size() == 2);
  auto ranked = plans_for(r, 30, false, false);
  REQUIRE(ranked.size() >= 3);
  for (int i = 0; i < 2; ++i) {
    auto redo = ranked[i].redo_labels(lts);
    CHECK(ranked[i].total_length == 10);
    CHECK(std::set<std::string>(redo.begin(), redo.end()) ==
          std::set<std::string>{"holdShuttle", "getAvailableRentalsHotel",
                                "carsHotel.true", "holdCar"});
  }
  CHECK(ranked[0].redo_labels(lts) != ranked[1].redo_labels(lts));
  CHECK(ranked[2].redo_labels(lts) ==
        std::vector<std::string>{"pickAirport", "getAvailableRentalsAirport",
                                 "carsAirport.true", "holdCar"});
  CHECK(ranked[2].total_length == 12);

  // pruning and filtering only ever remove plans
  KeySet all = keys(ranked);
  for (bool relevant : {false, true}) {
    for (bool filter : {false, true}) {
      for (const auto& p : plans_for(r, 30, relevant, filter)) {
        CHECK(all.count(plan_key(p)));
      }
    }
  }
  auto both = plans_for(r, 30, true, true);
  CHECK(both.size() * 10 <= ranked.size() * 4);
}

TEST_CASE("executing the airport plan completes the run") {
  Run r = scenario_run("t2.scn");
  auto ranked = plans_for(r, 20, false, true);
  auto it = std::find_if(ranked.begin(), ranked.end(), [&](const Plan& p) {
    auto l = p.redo_labels(r.lts());
    return !l.empty() && l.front() == "pickAirport";
  });
  REQUIRE(it != ranked.end());
  execute_plan(r, *it);
  CHECK(r.status() == RunStatus::kRunning);
  CHECK(r.monitors()[1].is_green(r.monitor_states()[1]));
  // the stale plan no longer applies
  CHECK_THROWS_AS(execute_plan(r, *it), PlanInapplicable);
}

TEST_CASE("problem construction errors") {
  Run r = scenario_run("t2.scn");
  CHECK_THROWS_AS(make_problem(r, {}, 0), Error);
  Run fresh(tbs().lts, tbs().monitors, Scenario{});
  fresh.Advance();
  CHECK_THROWS_AS(make_problem(fresh, {}, 5), Error);
  EnumerateOptions tiny;
  tiny.encode_limits.max_vars = 10;
  auto p = make_problem(r, visited_change_states(r.lts(), r.trace()), 10);
  CHECK_THROWS_AS(enumerate(p, tiny), EncodingTooLarge);
}
