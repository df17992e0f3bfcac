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

#include <fstream>
#include <regex>
#include <sstream>

#include "compass/errors.hpp"
#include "compass/workflow.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace compass;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Counts keywords in the raw source, skipping comments. Independent of the
// parser, so it cross-checks the AST walk.
std::size_t naive_change_count(const std::string& src) {
  std::istringstream in(src);
  std::string line;
  std::size_t n = 0;
  static const std::regex kw(R"((^|\s)(pick|flow)\s|\bnonidem\b)");
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    n += std::distance(std::sregex_iterator(line.begin(), line.end(), kw),
                       std::sregex_iterator());
  }
  return n;
}

const char* kSmall = R"(
workflow Small {
  var x;
  var y;
  seq main {
    receive(x)
    flow par {
      invoke P.a(in=x, out=y) nonidem comp P.undoA
      local b(in=x, out=x)
    }
    if ok (x, y)
      assign(x -> y)
    else
      terminate
    while loop (y) max 2
      local c(in=y, out=y)
  }
}
)";

}  // namespace

TEST_CASE("pretty printing is a fixed point of parsing") {
  for (const std::string& src : {std::string(kSmall), slurp(testing::fixture("tbs.wf"))}) {
    WorkflowDef a = parse_workflow(src);
    std::string printed = pretty_print(a);
    WorkflowDef b = parse_workflow(printed);
    CHECK(a == b);
    CHECK(pretty_print(b) == printed);
  }
}

TEST_CASE("parsed structure") {
  WorkflowDef d = parse_workflow(kSmall);
  CHECK(d.name == "Small");
  CHECK(d.variables == std::vector<std::string>{"x", "y"});
  CHECK(d.partners() == std::set<std::string>{"P"});
  const Activity* loop = find_activity(d, "loop");
  REQUIRE(loop != nullptr);
  REQUIRE(loop->as<While>() != nullptr);
  CHECK(loop->as<While>()->max_iter == 2);
  const Activity* ok = find_activity(d, "ok");
  REQUIRE(ok != nullptr);
  CHECK(ok->as<If>()->branches.size() == 2);
  CHECK(find_activity(d, "missing") == nullptr);
}

TEST_CASE("change activities agree with a keyword scan") {
  std::string src = slurp(testing::fixture("tbs.wf"));
  WorkflowDef d = parse_workflow(src);
  CHECK(count_change_activities(d) == naive_change_count(src));
  CHECK(count_change_activities(d) == 21);
  CHECK(count_change_activities(parse_workflow(kSmall)) ==
        naive_change_count(kSmall));
}

TEST_CASE("compensation table") {
  auto comps = list_compensations(testing::tbs().def);
  CHECK(comps.at("holdFlight") == "releaseFlight");
  CHECK(comps.at("bookHotel") == "cancelHotel");
  CHECK(comps.at("holdShuttle") == "releaseShuttle");
  CHECK(comps.at("getAvailableFlights") == "noop");
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_workflow("workflow W {\n  seq {\n    bogus\n  }\n}\n");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
    CHECK(e.col() == 5);
    CHECK(e.code() == "SyntaxError");
  }
  CHECK_THROWS_AS(parse_workflow("workflow W { seq { "), SyntaxError);
  CHECK_THROWS_AS(parse_workflow("workflow W { while w (x) max x local a(in=x, out=x) }"),
                  SyntaxError);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(parse_workflow("workflow W { var x; local a(in=y, out=x) }"),
                  ValidationError);
  CHECK_THROWS_AS(parse_workflow("workflow W { var x; var x; local a(in=x, out=x) }"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_workflow("workflow W { var x; seq s { local a(in=x, out=x) "
                     "seq s { local b(in=x, out=x) } } }"),
      ValidationError);
  CHECK_THROWS_AS(parse_workflow("workflow W { var x; pick p { } }"),
                  ValidationError);
  CHECK_THROWS_AS(load_workflow("/nonexistent/file.wf"), Error);
}
