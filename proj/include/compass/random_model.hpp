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

#ifndef COMPASS_RANDOM_MODEL_HPP_
#define COMPASS_RANDOM_MODEL_HPP_

#include <cstddef>
#include <memory>
#include <random>
#include <vector>

#include "compass/lts.hpp"
#include "compass/monitor.hpp"
#include "compass/planner.hpp"

namespace compass {

// Small synthetic models for cross-checking the planner and the analyses.
struct RandomLtsOptions {
  std::size_t min_states = 3;
  std::size_t max_states = 12;  // including the terminal state
  double back_edge_prob = 0.2;
  double comp_prob = 0.5;
  double change_prob = 0.5;
};

// Every non-final state has a forward edge to a higher-numbered state, so the
// final state is always reachable. Labels are drawn from {a, b, c, d, g}.
Lts random_lts(std::mt19937_64& rng, const RandomLtsOptions& opts = {});

// Liveness "g responds to a" followed by two safety monitors over the same
// alphabet ("no c after b", "d only after b").
std::vector<Monitor> random_model_monitors();

// A random walk of up to `max_trace` steps from the initial state, with the
// liveness monitor as the violated one and a random subset of the visited
// states as candidates.
PlanningProblem random_liveness_problem(std::mt19937_64& rng,
                                        std::shared_ptr<const Lts> lts,
                                        std::size_t k, std::size_t max_trace);

}  // namespace compass

#endif  // COMPASS_RANDOM_MODEL_HPP_
