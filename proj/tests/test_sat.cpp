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

#include <chrono>
#include <set>

#include "compass/errors.hpp"
#include "compass/sat.hpp"
#include "doctest.h"
#include "sat_corpus.hpp"

using namespace compass;
using namespace compass::testing;

TEST_CASE("corpus agrees with exhaustive evaluation") {
  std::size_t sat = 0, unsat = 0;
  for (const auto& [name, cnf] : sat_corpus()) {
    CAPTURE(name);
    REQUIRE(cnf.num_vars <= 20);
    bool expect = brute_force_count(cnf) > 0;
    auto m = solve(cnf);
    CHECK(m.has_value() == expect);
    if (m) {
      CHECK(evaluate(cnf, *m));
      ++sat;
    } else {
      ++unsat;
    }
  }
  // the corpus exercises both answers
  CHECK(sat > 20);
  CHECK(unsat > 20);
}

TEST_CASE("pigeonhole instances are refuted") {
  for (int h = 2; h <= 4; ++h) {
    auto start = std::chrono::steady_clock::now();
    CHECK_FALSE(solve(pigeonhole(h + 1, h)).has_value());
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(s < 10.0);
  }
  CHECK(solve(pigeonhole(5, 5)).has_value());
}

TEST_CASE("blocking clauses enumerate every model exactly once") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    int n = 3 + static_cast<int>(rng() % 8);
    CnfInstance cnf = random_ksat(rng, n, static_cast<int>(n * 2.5), 3);
    Solver s(cnf.num_vars);
    for (const auto& c : cnf.clauses) s.add_clause(c);
    std::set<std::vector<bool>> seen;
    while (s.solve()) {
      SatModel m = s.model();
      CHECK(evaluate(cnf, m));
      CHECK(seen.insert(m.assignment).second);
      Clause block;
      for (int v = 1; v <= n; ++v) block.push_back(m.value(v) ? -v : v);
      s.add_clause(block);
    }
    CHECK(seen.size() == brute_force_count(cnf));
  }
}

TEST_CASE("decisions are deterministic and prefer false") {
  CnfInstance c;
  c.num_vars = 3;
  c.add_clause({1, 2, 3});
  auto m = solve(c);
  REQUIRE(m);
  CHECK_FALSE(m->value(1));
  CHECK_FALSE(m->value(2));
  CHECK(m->value(3));
  CHECK(solve(c)->assignment == m->assignment);
}

TEST_CASE("incremental use") {
  Solver s;
  int a = s.new_var(), b = s.new_var();
  s.add_clause({a, b});
  CHECK(s.solve());
  s.add_clause({-a});
  CHECK(s.solve());
  CHECK(s.value(b));
  int c = s.new_var();
  s.add_clause({-b, c});
  CHECK(s.solve());
  CHECK(s.value(c));
  s.add_clause({-c});
  CHECK_FALSE(s.solve());
  CHECK_FALSE(s.solve());
  CHECK_THROWS_AS(s.add_clause({99}), Error);
  CHECK_THROWS_AS(s.add_clause({0}), Error);
}

TEST_CASE("budgets raise ResourceLimit") {
  Solver s;
  CnfInstance php = pigeonhole(9, 8);
  s.reserve_vars(php.num_vars);
  for (const auto& c : php.clauses) s.add_clause(c);
  SolveLimits lim;
  lim.max_conflicts = 10;
  CHECK_THROWS_AS(s.solve(lim), ResourceLimit);
}

TEST_CASE("DIMACS round trip") {
  for (const auto& [name, cnf] : sat_corpus(9)) {
    CnfInstance back = parse_dimacs(to_dimacs(cnf));
    CHECK(back.num_vars == cnf.num_vars);
    CHECK(back.clauses == cnf.clauses);
  }
  CnfInstance c = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3\n0\n");
  CHECK(c.clauses == std::vector<Clause>{{1, -2}, {2, 3}});
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 2\n1 0\n"), SyntaxError);
  CHECK_THROWS_AS(parse_dimacs("p cnf x y\n"), SyntaxError);
  CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), SyntaxError);
}
