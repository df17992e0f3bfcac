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

#ifndef COMPASS_WORKFLOW_HPP_
#define COMPASS_WORKFLOW_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace compass {

struct Activity;

struct Receive {
  std::string var;
  bool operator==(const Receive&) const = default;
};

// A partner service call. `idempotent` is false for calls whose outcome is not
// fully determined by their input (these identify change states).
struct Invoke {
  std::string partner;
  std::string op;
  std::string input;
  std::string output;
  bool idempotent = true;
  std::optional<std::string> comp_partner;
  std::optional<std::string> comp_op;
  bool operator==(const Invoke&) const = default;
};

struct Assign {
  std::string from;
  std::string to;
  bool operator==(const Assign&) const = default;
};

struct LocalCall {
  std::string op;
  std::string input;
  std::string output;
  bool operator==(const LocalCall&) const = default;
};

struct Sequence {
  std::vector<Activity> children;
  bool operator==(const Sequence&) const = default;
};

struct Flow {
  std::vector<Activity> branches;
  bool operator==(const Flow&) const = default;
};

// `events[i]` selects `bodies[i]`.
struct Pick {
  std::vector<std::string> events;
  std::vector<Activity> bodies;
  bool operator==(const Pick&) const = default;
};

// `branches` holds the then-branch and, optionally, the else-branch.
struct If {
  std::vector<std::string> cond_vars;
  std::vector<Activity> branches;
  bool operator==(const If&) const = default;
};

struct While {
  std::vector<std::string> cond_vars;
  int max_iter = 3;
  std::vector<Activity> body;  // exactly one element
  bool operator==(const While&) const = default;
};

struct Terminate {
  bool operator==(const Terminate&) const = default;
};

using ActivityNode = std::variant<Receive, Invoke, Assign, LocalCall, Sequence,
                                  Flow, Pick, If, While, Terminate>;

struct Activity {
  std::string id;
  ActivityNode node;

  bool operator==(const Activity&) const = default;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

struct WorkflowDef {
  std::string name;
  std::vector<std::string> variables;  // declaration order
  Activity root;

  // Partner names referenced by invokes, sorted.
  std::set<std::string> partners() const;

  bool operator==(const WorkflowDef&) const = default;
};

inline constexpr int kDefaultMaxIter = 3;
inline constexpr std::string_view kNoopCompensation = "noop";

WorkflowDef parse_workflow(std::string_view source);
WorkflowDef load_workflow(const std::string& path);

// Canonical textual form; reparses to an equal WorkflowDef.
std::string pretty_print(const WorkflowDef& def);

// Operation name -> compensation operation name, total over all invokes.
std::map<std::string, std::string> list_compensations(const WorkflowDef& def);

// Calls `fn(activity)` for every activity in pre-order.
template <class Fn>
void for_each_activity(const Activity& a, Fn&& fn) {
  fn(a);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Sequence>) {
          for (const auto& c : n.children) for_each_activity(c, fn);
        } else if constexpr (std::is_same_v<T, Flow>) {
          for (const auto& c : n.branches) for_each_activity(c, fn);
        } else if constexpr (std::is_same_v<T, Pick>) {
          for (const auto& c : n.bodies) for_each_activity(c, fn);
        } else if constexpr (std::is_same_v<T, If>) {
          for (const auto& c : n.branches) for_each_activity(c, fn);
        } else if constexpr (std::is_same_v<T, While>) {
          for (const auto& c : n.body) for_each_activity(c, fn);
        }
      },
      a.node);
}

// Looks up an activity by id; nullptr when absent.
const Activity* find_activity(const WorkflowDef& def, std::string_view id);

// Number of Picks, Flows and non-idempotent Invokes.
std::size_t count_change_activities(const WorkflowDef& def);

}  // namespace compass

#endif  // COMPASS_WORKFLOW_HPP_
