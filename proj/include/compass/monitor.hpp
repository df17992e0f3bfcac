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

#ifndef COMPASS_MONITOR_HPP_
#define COMPASS_MONITOR_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace compass {

enum class PropertyKind { kSafety, kLiveness };
enum class PatternKind { kAbsence, kExistence, kResponse, kPrecedence };
enum class ScopeKind { kGlobal, kAfter };
enum class AfterMode { kAllInAnyOrder, kAny };

// Pattern operands. Absence/Existence use `first` only; Response reads
// first = triggers, second = responses; Precedence first = must come first,
// second = guarded events.
struct PropertySpec {
  std::string name;
  PropertyKind kind = PropertyKind::kSafety;
  PatternKind pattern = PatternKind::kAbsence;
  std::set<std::string> first;
  std::set<std::string> second;
  ScopeKind scope = ScopeKind::kGlobal;
  std::set<std::string> scope_events;
  AfterMode after_mode = AfterMode::kAny;
};

enum class Color { kNeutral, kGreen, kYellow, kRed };

using MonitorState = std::size_t;

// Deterministic automaton accepting the bad prefixes of one property. Events
// with no listed transition self-loop, so delta is total over any alphabet.
struct Monitor {
  std::string name;
  PropertyKind kind = PropertyKind::kSafety;
  std::size_t num_states = 0;
  std::set<std::string> alphabet;
  std::vector<std::map<std::string, MonitorState>> delta;
  MonitorState initial = 0;
  std::set<MonitorState> accepting;
  std::vector<Color> colors;

  bool is_red(MonitorState q) const { return accepting.count(q) > 0; }
  bool is_green(MonitorState q) const { return colors[q] == Color::kGreen; }
};

Monitor compile(const PropertySpec& spec);

// Assigns red/yellow/green/neutral from the transition structure.
Monitor color(Monitor m);

MonitorState step(const Monitor& m, MonitorState q, std::string_view event);

MonitorState run_monitor(const Monitor& m, const std::vector<std::string>& events);

std::vector<PropertySpec> parse_properties(std::string_view text);
std::vector<PropertySpec> load_properties(const std::string& path);

std::string to_dot(const Monitor& m);
const char* to_string(Color c);
const char* to_string(PropertyKind k);

}  // namespace compass

#endif  // COMPASS_MONITOR_HPP_
