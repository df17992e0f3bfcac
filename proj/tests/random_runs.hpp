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

#ifndef COMPASS_TESTS_RANDOM_RUNS_HPP_
#define COMPASS_TESTS_RANDOM_RUNS_HPP_

#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "compass/dependency.hpp"
#include "compass/engine.hpp"
#include "compass/planner.hpp"
#include "compass/random_model.hpp"

namespace compass::testing {

// Drives a random model with random answers until the run stops. Returns
// the run only if it ended on a violation of the requested kind.
inline std::optional<Run> random_violated_run(std::mt19937_64& rng,
                                              PropertyKind kind) {
  static const auto monitors =
      std::make_shared<const std::vector<Monitor>>(random_model_monitors());
  auto lts = std::make_shared<const Lts>(random_lts(rng));
  Run r(lts, monitors, Scenario{});
  r.Advance();
  for (int i = 0; i < 30 && r.status() == RunStatus::kAwaitingChoice; ++i) {
    const auto& p = r.pending_choices();
    r.Answer(p[rng() % p.size()]);
  }
  if (r.status() != RunStatus::kViolated || r.violation()->kind != kind) {
    return std::nullopt;
  }
  return r;
}

struct PlanCase {
  Run run;
  PlanningProblem problem;
};

// Liveness violations on random models, each with a plan problem whose
// candidates are the visited change states and a random horizon.
inline std::vector<PlanCase> random_plan_cases(std::mt19937_64& rng,
                                               std::size_t count) {
  std::vector<PlanCase> out;
  while (out.size() < count) {
    auto r = random_violated_run(rng, PropertyKind::kLiveness);
    if (!r) continue;
    std::size_t k = 1 + rng() % 8;
    auto cands = visited_change_states(r->lts(), r->trace());
    PlanningProblem p = make_problem(*r, cands, k);
    out.push_back({*r, std::move(p)});
  }
  return out;
}

}  // namespace compass::testing

#endif  // COMPASS_TESTS_RANDOM_RUNS_HPP_
