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

#ifndef COMPASS_TESTS_DEP_ORACLE_HPP_
#define COMPASS_TESTS_DEP_ORACLE_HPP_

#include <random>
#include <string>
#include <vector>

#include "compass/dependency.hpp"
#include "compass/lts.hpp"

namespace compass::testing {

inline const char* kVars[] = {"x", "y", "z"};

inline DefUseTable random_table(std::mt19937_64& rng, const Lts& lts) {
  DefUseTable t;
  t.rows.resize(lts.transitions.size());
  for (TransitionId i = 0; i < lts.transitions.size(); ++i) {
    if (lts.transitions[i].kind != TransitionKind::kForward) continue;
    for (const char* v : kVars) {
      if (rng() % 3 == 0) t.rows[i].def.insert(v);
      if (rng() % 3 == 0) t.rows[i].use.insert(v);
    }
  }
  return t;
}

// Explicit search over simple paths: is there a forward path from `from` to
// `to` with no edge defining `var`?
inline bool clear_path(const Lts& lts, const DefUseTable& table, StateId from,
                StateId to, const std::string& var, std::vector<bool>& on_path) {
  if (from == to) return true;
  on_path[from] = true;
  bool found = false;
  for (TransitionId t = 0; t < lts.transitions.size() && !found; ++t) {
    const Transition& tr = lts.transitions[t];
    if (tr.src != from || tr.kind != TransitionKind::kForward) continue;
    if (table.rows[t].def.count(var) || on_path[tr.dst]) continue;
    found = clear_path(lts, table, tr.dst, to, var, on_path);
  }
  on_path[from] = false;
  return found;
}

inline bool oracle_direct(const Lts& lts, const DefUseTable& table, TransitionId u,
                   TransitionId v) {
  const Transition& tu = lts.transitions[u];
  const Transition& tv = lts.transitions[v];
  if (tu.kind != TransitionKind::kForward || tv.kind != TransitionKind::kForward) {
    return false;
  }
  for (const auto& x : table.rows[u].def) {
    if (!table.rows[v].use.count(x)) continue;
    std::vector<bool> on_path(lts.num_states, false);
    if (clear_path(lts, table, tu.dst, tv.src, x, on_path)) return true;
  }
  return false;
}

// Warshall closure of the oracle's direct relation; reach[u][v] means v
// depends on u through one or more sections.
inline std::vector<std::vector<bool>> oracle_closure(const Lts& lts,
                                              const DefUseTable& table) {
  std::size_t n = lts.transitions.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (TransitionId u = 0; u < n; ++u) {
    for (TransitionId v = 0; v < n; ++v) r[u][v] = oracle_direct(lts, table, u, v);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (r[k][j]) r[i][j] = true;
      }
    }
  }
  return r;
}

}  // namespace compass::testing

#endif  // COMPASS_TESTS_DEP_ORACLE_HPP_
