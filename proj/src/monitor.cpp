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

#include "compass/monitor.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "compass/errors.hpp"
#include "compass/lts.hpp"

namespace compass {

namespace {

// A pattern automaton before scoping; state 0 is initial.
struct Automaton {
  std::size_t n = 0;
  std::vector<std::map<std::string, MonitorState>> delta;
  std::set<MonitorState> red;

  MonitorState Add() {
    delta.emplace_back();
    return n++;
  }
  void On(MonitorState from, const std::set<std::string>& events,
          MonitorState to) {
    for (const auto& e : events) delta[from].emplace(e, to);
  }
};

Automaton PatternAutomaton(const PropertySpec& spec) {
  Automaton a;
  const std::set<std::string> ter{kTer};
  switch (spec.pattern) {
    case PatternKind::kAbsence: {
      if (spec.kind != PropertyKind::kSafety) {
        throw UnsupportedPattern(spec.name + ": absence must be a safety property");
      }
      MonitorState ok = a.Add(), bad = a.Add();
      a.On(ok, spec.first, bad);
      a.red.insert(bad);
      break;
    }
    case PatternKind::kExistence: {
      if (spec.kind != PropertyKind::kLiveness) {
        throw UnsupportedPattern(spec.name + ": existence must be a liveness property");
      }
      MonitorState wait = a.Add(), done = a.Add(), bad = a.Add();
      a.On(wait, spec.first, done);
      a.On(wait, ter, bad);
      a.red.insert(bad);
      break;
    }
    case PatternKind::kResponse: {
      if (spec.kind != PropertyKind::kLiveness) {
        throw UnsupportedPattern(spec.name + ": response must be a liveness property");
      }
      MonitorState idle = a.Add(), wait = a.Add(), bad = a.Add();
      for (const auto& t : spec.first) {
        if (!spec.second.count(t)) a.delta[idle].emplace(t, wait);
      }
      a.On(wait, spec.second, idle);
      a.On(wait, ter, bad);
      a.red.insert(bad);
      break;
    }
    case PatternKind::kPrecedence: {
      if (spec.kind != PropertyKind::kSafety) {
        throw UnsupportedPattern(spec.name + ": precedence must be a safety property");
      }
      MonitorState init = a.Add(), bad = a.Add(), done = a.Add();
      a.On(init, spec.first, done);
      for (const auto& l : spec.second) {
        if (!spec.first.count(l)) a.delta[init].emplace(l, bad);
      }
      a.red.insert(bad);
      break;
    }
  }
  if (spec.first.empty() ||
      ((spec.pattern == PatternKind::kResponse ||
        spec.pattern == PatternKind::kPrecedence) &&
       spec.second.empty())) {
    throw UnsupportedPattern(spec.name + ": pattern needs non-empty event sets");
  }
  return a;
}

std::set<std::string> SplitSet(const std::string& v) {
  std::string body = v;
  if (body.size() >= 2 && body.front() == '{' && body.back() == '}') {
    body = body.substr(1, body.size() - 2);
  }
  std::set<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

}  // namespace

Monitor compile(const PropertySpec& spec) {
  Automaton pat = PatternAutomaton(spec);

  Monitor m;
  m.name = spec.name;
  m.kind = spec.kind;

  std::size_t offset = 0;
  if (spec.scope == ScopeKind::kAfter) {
    if (spec.scope_events.empty()) {
      throw UnsupportedPattern(spec.name + ": after-scope needs events");
    }
    std::vector<std::string> opens(spec.scope_events.begin(),
                                   spec.scope_events.end());
    if (spec.after_mode == AfterMode::kAny) {
      offset = 1;
      m.delta.resize(1);
      for (const auto& e : opens) m.delta[0].emplace(e, offset);
    } else {
      if (opens.size() > 10) {
        throw UnsupportedPattern(spec.name + ": too many scope events");
      }
      // Lattice of already-seen subsets; the full set arms the pattern.
      std::size_t full = (std::size_t{1} << opens.size()) - 1;
      offset = full;
      m.delta.resize(full);
      for (std::size_t mask = 0; mask < full; ++mask) {
        for (std::size_t i = 0; i < opens.size(); ++i) {
          std::size_t bit = std::size_t{1} << i;
          if (mask & bit) continue;
          std::size_t next = mask | bit;
          m.delta[mask].emplace(opens[i], next == full ? offset : next);
        }
      }
    }
    for (const auto& e : opens) m.alphabet.insert(e);
  }
  for (MonitorState q = 0; q < pat.n; ++q) {
    std::map<std::string, MonitorState> row;
    for (const auto& [e, d] : pat.delta[q]) row.emplace(e, d + offset);
    m.delta.push_back(std::move(row));
  }
  for (MonitorState r : pat.red) m.accepting.insert(r + offset);
  m.num_states = m.delta.size();
  // Violations are final.
  for (MonitorState r : m.accepting) m.delta[r].clear();
  for (const auto& row : m.delta) {
    for (const auto& [e, d] : row) m.alphabet.insert(e);
  }
  m.initial = 0;
  return color(std::move(m));
}

Monitor color(Monitor m) {
  m.colors.assign(m.num_states, Color::kNeutral);
  for (MonitorState q : m.accepting) m.colors[q] = Color::kRed;
  for (MonitorState q = 0; q < m.num_states; ++q) {
    if (m.is_red(q)) continue;
    for (const auto& [e, d] : m.delta[q]) {
      if (m.is_red(d)) {
        m.colors[q] = Color::kYellow;
        break;
      }
    }
  }
  std::vector<Color> base = m.colors;
  for (MonitorState q = 0; q < m.num_states; ++q) {
    if (base[q] != Color::kYellow) continue;
    for (const auto& [e, d] : m.delta[q]) {
      if (base[d] == Color::kNeutral) m.colors[d] = Color::kGreen;
    }
  }
  return m;
}

MonitorState step(const Monitor& m, MonitorState q, std::string_view event) {
  const auto& row = m.delta[q];
  auto it = row.find(std::string(event));
  return it == row.end() ? q : it->second;
}

MonitorState run_monitor(const Monitor& m,
                         const std::vector<std::string>& events) {
  MonitorState q = m.initial;
  for (const auto& e : events) q = step(m, q, e);
  return q;
}

std::vector<PropertySpec> parse_properties(std::string_view text) {
  std::vector<PropertySpec> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    // Collapse whitespace inside braces so sets tokenize as one word.
    std::string norm;
    int depth = 0;
    for (char c : line) {
      if (c == '{') ++depth;
      if (c == '}') --depth;
      if (depth > 0 && std::isspace(static_cast<unsigned char>(c))) continue;
      norm.push_back(c);
    }
    std::istringstream words(norm);
    std::vector<std::string> w;
    for (std::string s; words >> s;) w.push_back(s);
    if (w.empty()) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw SyntaxError(lineno, 1, msg);
    };
    if (w[0] != "property" || w.size() < 4) fail("expected 'property NAME KIND PATTERN ...'");
    PropertySpec p;
    p.name = w[1];
    if (w[2] == "safety") {
      p.kind = PropertyKind::kSafety;
    } else if (w[2] == "liveness") {
      p.kind = PropertyKind::kLiveness;
    } else {
      fail("unknown property kind '" + w[2] + "'");
    }
    if (w[3] == "absence") {
      p.pattern = PatternKind::kAbsence;
    } else if (w[3] == "existence") {
      p.pattern = PatternKind::kExistence;
    } else if (w[3] == "response") {
      p.pattern = PatternKind::kResponse;
    } else if (w[3] == "precedence") {
      p.pattern = PatternKind::kPrecedence;
    } else {
      fail("unknown pattern '" + w[3] + "'");
    }
    for (std::size_t i = 4; i < w.size(); ++i) {
      auto eq = w[i].find('=');
      if (eq == std::string::npos) fail("expected key=value, got '" + w[i] + "'");
      std::string key = w[i].substr(0, eq), val = w[i].substr(eq + 1);
      if (key == "event" || key == "events" || key == "trigger" ||
          key == "first") {
        p.first = SplitSet(val);
      } else if (key == "response" || key == "later") {
        p.second = SplitSet(val);
      } else if (key == "scope") {
        if (val == "global") {
          p.scope = ScopeKind::kGlobal;
        } else if (val == "after") {
          p.scope = ScopeKind::kAfter;
        } else {
          fail("unknown scope '" + val + "'");
        }
      } else if (key == "scope-events") {
        p.scope_events = SplitSet(val);
      } else if (key == "mode") {
        if (val == "all-in-any-order") {
          p.after_mode = AfterMode::kAllInAnyOrder;
        } else if (val == "any") {
          p.after_mode = AfterMode::kAny;
        } else {
          fail("unknown after mode '" + val + "'");
        }
      } else {
        fail("unknown key '" + key + "'");
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PropertySpec> load_properties(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open property file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_properties(ss.str());
}

const char* to_string(Color c) {
  switch (c) {
    case Color::kNeutral:
      return "neutral";
    case Color::kGreen:
      return "green";
    case Color::kYellow:
      return "yellow";
    case Color::kRed:
      return "red";
  }
  return "?";
}

const char* to_string(PropertyKind k) {
  return k == PropertyKind::kSafety ? "safety" : "liveness";
}

std::string to_dot(const Monitor& m) {
  static const char* fill[] = {"white", "palegreen", "khaki1", "tomato"};
  std::ostringstream os;
  os << "digraph \"" << m.name << "\" {\n  rankdir=LR;\n";
  for (MonitorState q = 0; q < m.num_states; ++q) {
    os << "  q" << q + 1 << " [label=\"" << q + 1 << "\", style=filled"
       << ", fillcolor=" << fill[static_cast<int>(m.colors[q])]
       << (m.is_red(q) ? ", shape=doublecircle" : ", shape=circle") << "];\n";
  }
  os << "  init [shape=point];\n  init -> q" << m.initial + 1 << ";\n";
  for (MonitorState q = 0; q < m.num_states; ++q) {
    std::map<MonitorState, std::vector<std::string>> grouped;
    for (const auto& [e, d] : m.delta[q]) grouped[d].push_back(e);
    for (const auto& [d, evs] : grouped) {
      os << "  q" << q + 1 << " -> q" << d + 1 << " [label=\"";
      for (std::size_t i = 0; i < evs.size(); ++i) os << (i ? "," : "") << evs[i];
      os << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace compass
