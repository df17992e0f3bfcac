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

#include "compass/sat.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <sstream>

#include "compass/errors.hpp"

namespace compass {

void CnfInstance::add_clause(Clause c) {
  for (int l : c) num_vars = std::max(num_vars, std::abs(l));
  clauses.push_back(std::move(c));
}

bool evaluate(const CnfInstance& inst, const SatModel& model) {
  for (const Clause& c : inst.clauses) {
    if (std::none_of(c.begin(), c.end(),
                     [&](int l) { return model.satisfies(l); })) {
      return false;
    }
  }
  return true;
}

Solver::Solver(int num_vars) { reserve_vars(num_vars); }

int Solver::new_var() {
  reserve_vars(num_vars_ + 1);
  return num_vars_;
}

void Solver::reserve_vars(int n) {
  if (n <= num_vars_) return;
  num_vars_ = n;
  watches_.resize(2 * std::size_t(n));
  assigns_.resize(n, -1);
  level_.resize(n, 0);
  reason_.resize(n, -1);
  seen_.resize(n, 0);
}

int Solver::lit_value(Lit l) const {
  signed char a = assigns_[var_of(l)];
  if (a < 0) return -1;
  return a ^ int(l & 1u);
}

void Solver::assign(Lit l, int reason) {
  int v = var_of(l);
  assigns_[v] = static_cast<signed char>((l & 1u) ? 0 : 1);
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::attach(std::vector<Lit> lits) {
  int idx = static_cast<int>(clauses_.size());
  watches_[lits[0]].push_back(idx);
  watches_[lits[1]].push_back(idx);
  clauses_.push_back(std::move(lits));
  return idx;
}

void Solver::add_clause(const Clause& c) {
  for (int d : c) {
    if (d == 0 || std::abs(d) > num_vars_) {
      throw Error("InvalidLiteral",
                  "literal " + std::to_string(d) + " is out of range");
    }
  }
  if (unsat_) return;
  backtrack(0);
  std::vector<Lit> lits;
  for (int d : c) lits.push_back(to_lit(d));
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return;
    int v = lit_value(lits[i]);
    if (v == 1) return;
    if (v == -1) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    unsat_ = true;
  } else if (kept.size() == 1) {
    assign(kept[0], -1);
    if (propagate() != -1) unsat_ = true;
  } else {
    attach(std::move(kept));
  }
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit false_lit = neg(p);
    std::vector<int>& ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      int ci = ws[i++];
      std::vector<Lit>& c = clauses_[ci];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_value(c[0]) == 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ci;
      }
      ++stats_.propagations;
      assign(c[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

void Solver::analyze(int conflict, std::vector<Lit>& learnt, int& back_level) {
  const int current = static_cast<int>(trail_lim_.size());
  int path = 0;
  bool have_p = false;
  Lit p = 0;
  learnt.assign(1, 0);
  std::size_t idx = trail_.size();
  int ci = conflict;
  do {
    const std::vector<Lit>& c = clauses_[ci];
    for (std::size_t j = have_p ? 1 : 0; j < c.size(); ++j) {
      int v = var_of(c[j]);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      if (level_[v] >= current) {
        ++path;
      } else {
        learnt.push_back(c[j]);
      }
    }
    while (!seen_[var_of(trail_[--idx])]) {
    }
    p = trail_[idx];
    have_p = true;
    ci = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);

  back_level = 0;
  std::size_t max_i = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    int lv = level_[var_of(learnt[i])];
    if (lv > back_level) {
      back_level = lv;
      max_i = i;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (Lit l : learnt) seen_[var_of(l)] = 0;
}

void Solver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  for (std::size_t i = trail_.size(); i > trail_lim_[level]; --i) {
    int v = var_of(trail_[i - 1]);
    assigns_[v] = -1;
    reason_[v] = -1;
    next_var_ = std::min(next_var_, v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

bool Solver::solve(const SolveLimits& limits) {
  if (unsat_) return false;
  backtrack(0);
  if (propagate() != -1) {
    unsat_ = true;
    return false;
  }
  next_var_ = 0;
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t conflicts = 0;
  std::vector<Lit> learnt;
  while (true) {
    int confl = propagate();
    if (confl != -1) {
      ++stats_.conflicts;
      ++conflicts;
      if (trail_lim_.empty()) {
        unsat_ = true;
        return false;
      }
      bool over = limits.max_conflicts && conflicts > limits.max_conflicts;
      if (!over && limits.max_seconds > 0 && conflicts % 256 == 0) {
        std::chrono::duration<double> el =
            std::chrono::steady_clock::now() - start;
        over = el.count() > limits.max_seconds;
      }
      if (over) {
        backtrack(0);
        throw ResourceLimit("SAT budget exhausted after " +
                            std::to_string(conflicts) + " conflicts");
      }
      int back_level = 0;
      analyze(confl, learnt, back_level);
      backtrack(back_level);
      ++stats_.learned;
      if (learnt.size() == 1) {
        assign(learnt[0], -1);
      } else {
        int idx = attach(learnt);
        assign(clauses_[idx][0], idx);
      }
      continue;
    }
    while (next_var_ < num_vars_ && assigns_[next_var_] >= 0) ++next_var_;
    if (next_var_ == num_vars_) {
      model_.assign(num_vars_ + 1, false);
      for (int v = 0; v < num_vars_; ++v) model_[v + 1] = assigns_[v] == 1;
      backtrack(0);
      return true;
    }
    ++stats_.decisions;
    trail_lim_.push_back(trail_.size());
    assign(Lit(2 * next_var_ + 1), -1);
  }
}

SatModel Solver::model() const { return SatModel{model_}; }

bool Solver::value(int var) const { return model_.at(var); }

std::optional<SatModel> solve(const CnfInstance& inst,
                              const SolveLimits& limits) {
  Solver s(inst.num_vars);
  for (const Clause& c : inst.clauses) s.add_clause(c);
  if (!s.solve(limits)) return std::nullopt;
  return s.model();
}

std::string to_dimacs(const CnfInstance& inst) {
  std::ostringstream out;
  out << "p cnf " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
  for (const Clause& c : inst.clauses) {
    for (int l : c) out << l << ' ';
    out << "0\n";
  }
  return out.str();
}

CnfInstance parse_dimacs(std::string_view text) {
  CnfInstance inst;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::size_t declared = 0;
  Clause cur;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%") {
      continue;
    }
    if (first == "p") {
      std::string fmt;
      long long v = -1, c = -1;
      if (header || !(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0) {
        throw SyntaxError(lineno, 1, "malformed problem line");
      }
      header = true;
      inst.num_vars = static_cast<int>(v);
      declared = static_cast<std::size_t>(c);
      continue;
    }
    if (!header) throw SyntaxError(lineno, 1, "clause before problem line");
    std::istringstream nums(line);
    long long x;
    while (nums >> x) {
      if (x == 0) {
        inst.clauses.push_back(std::move(cur));
        cur.clear();
      } else if (std::llabs(x) > inst.num_vars) {
        throw SyntaxError(lineno, 1,
                          "literal " + std::to_string(x) + " out of range");
      } else {
        cur.push_back(static_cast<int>(x));
      }
    }
    if (!nums.eof()) throw SyntaxError(lineno, 1, "expected an integer");
  }
  if (!cur.empty()) inst.clauses.push_back(std::move(cur));
  if (!header) throw SyntaxError(lineno, 1, "missing problem line");
  if (inst.clauses.size() != declared) {
    throw SyntaxError(lineno, 1,
                      "header declares " + std::to_string(declared) +
                          " clauses, found " +
                          std::to_string(inst.clauses.size()));
  }
  return inst;
}

}  // namespace compass
