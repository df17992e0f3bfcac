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

#ifndef COMPASS_SAT_HPP_
#define COMPASS_SAT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace compass {

// Literals are signed, 1-based variable ids as in DIMACS.
using Clause = std::vector<int>;

struct CnfInstance {
  int num_vars = 0;
  std::vector<Clause> clauses;

  void add_clause(Clause c);
};

struct SatModel {
  std::vector<bool> assignment;  // index 0 unused

  bool value(int var) const { return assignment.at(var); }
  bool satisfies(int lit) const {
    return lit > 0 ? value(lit) : !value(-lit);
  }
};

// True iff every clause has a literal made true by the model.
bool evaluate(const CnfInstance& inst, const SatModel& model);

struct SolveLimits {
  std::uint64_t max_conflicts = 0;  // 0 means unlimited
  double max_seconds = 0;           // 0 means unlimited
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t learned = 0;
};

// Conflict-driven clause learning over two watched literals. Decisions take
// the lowest unassigned variable and try `false` first, so runs are fully
// reproducible. Clauses added between solve() calls persist.
class Solver {
 public:
  explicit Solver(int num_vars = 0);

  int num_vars() const { return num_vars_; }
  int new_var();
  void reserve_vars(int n);

  // Literals must reference declared variables. An empty clause makes every
  // later solve() UNSAT.
  void add_clause(const Clause& c);

  // Returns true for SAT. Throws ResourceLimit when the budget runs out.
  bool solve(const SolveLimits& limits = {});

  SatModel model() const;
  bool value(int var) const;
  const SolverStats& stats() const { return stats_; }

 private:
  using Lit = std::uint32_t;
  static Lit to_lit(int dimacs) {
    return dimacs > 0 ? Lit(2 * (dimacs - 1)) : Lit(2 * (-dimacs - 1) + 1);
  }
  static Lit neg(Lit l) { return l ^ 1u; }
  static int var_of(Lit l) { return int(l >> 1); }

  int lit_value(Lit l) const;  // 1 true, 0 false, -1 unassigned
  void assign(Lit l, int reason);
  int propagate();  // conflicting clause index, or -1
  void analyze(int conflict, std::vector<Lit>& learnt, int& back_level);
  void backtrack(int level);
  int attach(std::vector<Lit> lits);

  int num_vars_ = 0;
  bool unsat_ = false;
  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal
  std::vector<signed char> assigns_;       // per variable
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  int next_var_ = 0;
  std::vector<char> seen_;
  std::vector<bool> model_;
  SolverStats stats_;
};

// One-shot convenience wrapper; nullopt means UNSAT.
std::optional<SatModel> solve(const CnfInstance& inst,
                              const SolveLimits& limits = {});

std::string to_dimacs(const CnfInstance& inst);
CnfInstance parse_dimacs(std::string_view text);

}  // namespace compass

#endif  // COMPASS_SAT_HPP_
