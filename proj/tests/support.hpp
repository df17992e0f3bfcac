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

#ifndef COMPASS_TESTS_SUPPORT_HPP_
#define COMPASS_TESTS_SUPPORT_HPP_

#include <memory>
#include <string>
#include <vector>

#include "compass/dependency.hpp"
#include "compass/engine.hpp"
#include "compass/lts.hpp"
#include "compass/monitor.hpp"
#include "compass/workflow.hpp"

namespace compass::testing {

inline std::string fixture(const std::string& name) {
  return std::string(COMPASS_FIXTURES) + "/" + name;
}

struct Tbs {
  WorkflowDef def;
  std::shared_ptr<const Lts> lts;
  std::shared_ptr<std::vector<Monitor>> monitors;
};

inline Tbs load_tbs() {
  Tbs t;
  t.def = load_workflow(fixture("tbs.wf"));
  t.lts = std::make_shared<const Lts>(build_model(t.def));
  t.monitors = std::make_shared<std::vector<Monitor>>();
  for (const auto& p : load_properties(fixture("tbs.props"))) {
    t.monitors->push_back(compile(p));
  }
  return t;
}

// Loaded once per test binary; the model is immutable.
inline const Tbs& tbs() {
  static const Tbs t = load_tbs();
  return t;
}

inline Run scenario_run(const std::string& scn) {
  const Tbs& t = tbs();
  Run r(t.lts, t.monitors, load_scenario(fixture(scn)));
  r.Advance();
  return r;
}

inline std::vector<std::string> labels_of(const Lts& lts,
                                          const std::vector<TransitionId>& ts) {
  std::vector<std::string> out;
  for (TransitionId t : ts) out.push_back(lts.transitions[t].label);
  return out;
}

}  // namespace compass::testing

#endif  // COMPASS_TESTS_SUPPORT_HPP_
