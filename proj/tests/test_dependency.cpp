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

#include <random>

#include "compass/dependency.hpp"
#include "compass/random_model.hpp"
#include "dep_oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace compass;

using namespace compass::testing;

TEST_CASE("direct dependence matches explicit path search") {
  std::mt19937_64 rng(11);
  std::size_t positives = 0, models = 0;
  for (int i = 0; i < 150; ++i) {
    Lts lts = random_lts(rng);
    CHECK(lts.num_states <= 12);
    DefUseTable table = random_table(rng, lts);
    DependencyRelation rel = build_dependencies(lts, table);
    auto closure = oracle_closure(lts, table);
    ++models;
    for (TransitionId u = 0; u < lts.transitions.size(); ++u) {
      for (TransitionId v = 0; v < lts.transitions.size(); ++v) {
        bool expect = oracle_direct(lts, table, u, v);
        positives += expect;
        CHECK(directly_data_dependent(lts, table, u, v) == expect);
        CHECK(rel.direct.count({v, u}) == static_cast<std::size_t>(expect));
        CHECK(data_dependent(rel, u, v) == closure[u][v]);
      }
    }
  }
  CHECK(models == 150);
  CHECK(positives > 100);
}

TEST_CASE("definitions and uses follow activity parameters") {
  const auto& t = testing::tbs();
  DefUseTable table = build_defuse(*t.lts, t.def);
  for (TransitionId i = 0; i < t.lts->transitions.size(); ++i) {
    const Transition& tr = t.lts->transitions[i];
    const DefUse& du = table.at(i);
    if (tr.kind != TransitionKind::kForward) {
      CHECK(du.def.empty());
      CHECK(du.use.empty());
      continue;
    }
    if (tr.label == "holdCar") {
      CHECK(du.use == std::set<std::string>{"availableCars"});
      CHECK(du.def == std::set<std::string>{"carReservation"});
    }
    if (tr.label == "datesOk.true" || tr.label == "datesOk.false") {
      CHECK(du.use == std::set<std::string>{"consistent"});
      CHECK(du.def.empty());
    }
    if (tr.decision == DecisionKind::kPick) CHECK(du.def.empty());
  }
}

TEST_CASE("relevant change states on trace t1") {
  const auto& t = testing::tbs();
  Run r = testing::scenario_run("t1.scn");
  DefUseTable table = build_defuse(*t.lts, t.def);
  DependencyRelation rel = build_dependencies(*t.lts, table);
  auto closure = oracle_closure(*t.lts, table);

  auto calls = trace_calls(*t.lts, t.def, table, rel, r.trace());
  std::size_t relevant = 0;
  std::set<TransitionId> taken(r.trace().steps.begin(), r.trace().steps.end());
  for (const auto& c : calls) {
    bool expect = false;
    for (TransitionId ctl : control_transitions(*t.lts, table)) {
      expect |= taken.count(ctl) && closure[c.transition][ctl];
    }
    CHECK(c.relevant == expect);
    relevant += c.relevant;
  }
  CHECK(calls.size() == 9);
  CHECK(relevant == 5);

  auto visited = visited_change_states(*t.lts, r.trace());
  auto kept = relevant_change_states(*t.lts, table, rel, r.trace());
  auto kept_model =
      relevant_change_states(*t.lts, table, rel, r.trace(), ControlScope::kModel);
  CHECK(std::includes(visited.begin(), visited.end(), kept.begin(), kept.end()));
  CHECK(std::includes(kept_model.begin(), kept_model.end(), kept.begin(), kept.end()));
  for (StateId s : visited) {
    const ChangeInfo& info = t.lts->change_states.at(s);
    if (info.kind != ChangeKind::kNonIdemInvoke) {
      CHECK(kept.count(s));
    } else {
      bool call_relevant = false;
      for (const auto& c : calls) {
        if (r.trace().states[c.step] == s) call_relevant |= c.relevant;
      }
      CHECK(kept.count(s) == static_cast<std::size_t>(call_relevant));
    }
  }
}

TEST_CASE("predicate table") {
  const auto& t = testing::tbs();
  DefUseTable table = build_defuse(*t.lts, t.def);
  DependencyRelation rel = build_dependencies(*t.lts, table);
  auto rows = predicate_dependences(*t.lts, t.def, table, rel);
  std::map<std::string, std::set<std::string>> by;
  for (const auto& r : rows) by[r.predicate] = r.ops;
  CHECK(by.size() == 5);
  CHECK(by.at("haveFlights").count("getAvailableFlights"));
  CHECK(by.at("carsHotel") == std::set<std::string>{"getAvailableRentalsHotel"});
  CHECK(by.at("carsAirport") == std::set<std::string>{"getAvailableRentalsAirport"});
  CHECK(by.at("datesOk").count("holdHotel"));
}
