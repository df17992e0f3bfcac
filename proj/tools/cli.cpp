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

#include "cli.hpp"

#include <filesystem>
#include <iomanip>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "compass/dependency.hpp"
#include "compass/errors.hpp"
#include "compass/io.hpp"
#include "compass/planner.hpp"
#include "compass/random_model.hpp"
#include "compass/service.hpp"
#include "httplib.h"

namespace compass {

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::size_t max_states = 100000;
  std::string format = "text";
  bool json() const { return format == "machine-readable"; }
};

struct Model {
  WorkflowDef def;
  std::shared_ptr<const Lts> lts;
  std::shared_ptr<std::vector<Monitor>> monitors;
  DefUseTable table;
  DependencyRelation rel;
};

Model load_model(const std::string& wf, const std::string& props,
                 const Globals& g) {
  Model m;
  m.def = load_workflow(wf);
  TranslateOptions opts;
  opts.max_states = g.max_states;
  m.lts = std::make_shared<const Lts>(build_model(m.def, opts));
  m.monitors = std::make_shared<std::vector<Monitor>>();
  if (!props.empty()) {
    for (const auto& p : load_properties(props)) m.monitors->push_back(compile(p));
  }
  m.table = build_defuse(*m.lts, m.def);
  m.rel = build_dependencies(*m.lts, m.table);
  return m;
}

ControlScope parse_scope(const std::string& s) {
  return s == "model" ? ControlScope::kModel : ControlScope::kTrace;
}

std::set<StateId> candidates(const Model& m, const ExecutionTrace& trace,
                             bool relevant, ControlScope scope) {
  return relevant ? relevant_change_states(*m.lts, m.table, m.rel, trace, scope)
                  : visited_change_states(*m.lts, trace);
}

std::string absolute(const std::string& p) {
  return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
}

struct Loaded {
  Model model;
  TraceFile file;
};

Loaded load_trace(const std::string& path, const Globals& g,
                  const std::string& workflow = "") {
  Json j = read_json_file(path);
  TraceFile header = trace_header(j);
  Loaded l{load_model(workflow.empty() ? header.workflow : workflow,
                      header.properties, g),
           {}};
  l.file = trace_from_json(j, *l.model.lts);
  return l;
}

std::string fmt_seconds(double s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << s;
  return o.str();
}

struct Row {
  std::string scenario;
  std::size_t k = 0;
  std::size_t change_states = 0;
  bool sat = false;
  std::size_t vars = 0;
  std::size_t clauses = 0;
  std::size_t plans = 0;
  double seconds = 0;
};

struct PlanFlags {
  bool relevant = false;
  bool filter = false;
  std::string scope = "trace";
  std::string n = "all";
};

std::size_t parse_n(const std::string& n) {
  if (n == "all") return 0;
  try {
    return std::stoul(n);
  } catch (const std::exception&) {
    throw Error("InvalidArgument", "--n must be a number or 'all'");
  }
}

std::vector<Plan> plan_once(const Model& m, const ExecutionTrace& trace,
                            const ViolationReport& v, std::size_t k,
                            const PlanFlags& f, Row& row) {
  PlanningProblem problem =
      make_problem(m.lts, *m.monitors, trace, v,
                   candidates(m, trace, f.relevant, parse_scope(f.scope)), k,
                   parse_n(f.n));
  PlanStats st;
  auto start = std::chrono::steady_clock::now();
  std::vector<Plan> plans = generate_plans(problem, {}, &st);
  if (f.filter) plans = filter_forbidden(plans, trace, *m.lts, *m.monitors);
  row.k = k;
  row.change_states = problem.candidates.size();
  row.sat = problem.kind == PropertyKind::kLiveness;
  row.vars = st.vars;
  row.clauses = st.clauses;
  row.plans = plans.size();
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
  return plans;
}

Json row_json(const Row& r) {
  Json j{{"scenario", r.scenario}, {"k", r.k}, {"change_states", r.change_states}};
  j["vars"] = r.sat ? Json(r.vars) : Json(nullptr);
  j["clauses"] = r.sat ? Json(r.clauses) : Json(nullptr);
  j["plans"] = r.plans;
  j["seconds"] = r.seconds;
  return j;
}

void print_rows(std::ostream& out, const std::vector<Row>& rows,
                const Globals& g) {
  if (g.json()) {
    Json arr = Json::array();
    for (const Row& r : rows) arr.push_back(row_json(r));
    out << arr.dump(2) << '\n';
    return;
  }
  out << std::left << std::setw(10) << "scenario" << std::setw(5) << "k"
      << std::setw(15) << "change-states" << std::setw(9) << "vars"
      << std::setw(10) << "clauses" << std::setw(7) << "plans"
      << "seconds\n";
  for (const Row& r : rows) {
    out << std::left << std::setw(10) << r.scenario << std::setw(5) << r.k
        << std::setw(15) << r.change_states << std::setw(9)
        << (r.sat ? std::to_string(r.vars) : "--") << std::setw(10)
        << (r.sat ? std::to_string(r.clauses) : "--") << std::setw(7)
        << r.plans << fmt_seconds(r.seconds) << '\n';
  }
}

void print_plans(std::ostream& out, const std::vector<Plan>& plans,
                 const Lts& lts, const Globals& g) {
  if (g.json()) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < plans.size(); ++i) {
      Json p = to_json(plans[i], lts);
      p["rank"] = i + 1;
      arr.push_back(std::move(p));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const Plan& p = plans[i];
    out << '#' << (i + 1) << " length=" << p.total_length
        << " compensations=" << p.compensation_count
        << " change-state=" << p.change_state << "\n   undo:";
    for (const auto& u : p.undo) out << ' ' << u.label;
    if (p.undo.empty()) out << " -";
    out << "\n   redo:";
    for (const auto& l : p.redo_labels(lts)) out << ' ' << l;
    if (p.redo.empty()) out << " -";
    out << '\n';
  }
}

int cmd_compile(const Globals& g, const std::string& wf,
                const std::string& emit, bool pretty, std::ostream& out) {
  Model m = load_model(wf, "", g);
  if (!emit.empty()) write_text_file(emit, to_json(*m.lts).dump(2) + "\n");
  if (pretty) {
    out << pretty_print(m.def);
    return kExitOk;
  }
  LtsStats s = stats(*m.lts);
  std::size_t acts = count_change_activities(m.def);
  if (g.json()) {
    out << Json{{"states", s.states},
                {"forward", s.forward},
                {"transitions", s.transitions},
                {"labels", s.labels},
                {"change_states", s.change_states},
                {"change_activities", acts}}
               .dump(2)
        << '\n';
  } else {
    out << "states:            " << s.states << '\n'
        << "forward:           " << s.forward << '\n'
        << "transitions:       " << s.transitions << '\n'
        << "labels:            " << s.labels << '\n'
        << "change states:     " << s.change_states << '\n'
        << "change activities: " << acts << '\n';
  }
  return kExitOk;
}

int cmd_monitors(const Globals& g, const std::string& props, bool dot,
                 std::ostream& out) {
  Json arr = Json::array();
  for (const auto& spec : load_properties(props)) {
    Monitor m = compile(spec);
    if (dot) {
      out << to_dot(m);
      continue;
    }
    if (g.json()) {
      arr.push_back(to_json(m));
      continue;
    }
    out << m.name << " (" << to_string(m.kind) << "), " << m.num_states
        << " states\n";
    for (MonitorState q = 0; q < m.num_states; ++q) {
      out << "  " << (q + 1) << ": " << to_string(m.colors[q])
          << (q == m.initial ? " initial" : "") << '\n';
      for (const auto& [e, to] : m.delta[q]) {
        if (to != q) out << "     " << e << " -> " << (to + 1) << '\n';
      }
    }
  }
  if (g.json() && !dot) out << arr.dump(2) << '\n';
  return kExitOk;
}

int cmd_run(const Globals& g, const std::string& wf, const std::string& props,
            const std::string& scn, const std::string& trace_out,
            std::ostream& out) {
  Model m = load_model(wf, props, g);
  Run run(m.lts, m.monitors, load_scenario(scn));
  run.Advance();
  TraceFile tf{absolute(wf), absolute(props), absolute(scn), run.status(),
               run.trace(), run.violation()};
  Json j = to_json(tf, *m.lts);
  if (!trace_out.empty()) write_text_file(trace_out, j.dump(2) + "\n");
  if (g.json()) {
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "status: " << to_string(run.status()) << '\n'
      << "length: " << run.trace().length() << '\n';
  auto events = run.trace().events(*m.lts);
  for (std::size_t i = 0; i < events.size(); ++i) {
    out << std::setw(4) << (i + 1) << "  " << events[i] << '\n';
  }
  if (run.violation()) {
    const auto& v = *run.violation();
    out << "violation: " << v.property << " (" << to_string(v.kind)
        << ") pending event " << v.pending_event << " at state "
        << v.error_state << '\n';
  }
  if (run.status() == RunStatus::kAwaitingChoice) {
    out << "pending choices:";
    for (const auto& c : run.pending_choices()) out << ' ' << c;
    out << '\n';
  }
  return kExitOk;
}

int cmd_analyze(const Globals& g, const std::string& wf,
                const std::string& trace_path,
                bool relevant_only, const std::string& scope,
                std::ostream& out) {
  Loaded l = load_trace(trace_path, g, wf);
  const Model& m = l.model;
  const ExecutionTrace& tr = l.file.trace;
  ControlScope sc = parse_scope(scope);
  auto preds = predicate_dependences(*m.lts, m.def, m.table, m.rel);
  std::set<std::string> on_trace;
  for (TransitionId t : tr.steps) {
    if (m.lts->transitions[t].decision == DecisionKind::kBranch) {
      on_trace.insert(m.lts->transitions[t].decision_id);
    }
  }
  auto calls = trace_calls(*m.lts, m.def, m.table, m.rel, tr, sc);
  auto visited = visited_change_states(*m.lts, tr);
  auto relevant = relevant_change_states(*m.lts, m.table, m.rel, tr, sc);
  std::size_t rel_calls = 0;
  for (const auto& c : calls) rel_calls += c.relevant;

  if (g.json()) {
    Json jp = Json::array();
    for (const auto& p : preds) {
      if (relevant_only && sc == ControlScope::kTrace &&
          !on_trace.count(p.predicate)) {
        continue;
      }
      jp.push_back({{"predicate", p.predicate},
                    {"cond_vars", p.cond_vars},
                    {"on_trace", on_trace.count(p.predicate) > 0},
                    {"calls", p.ops}});
    }
    Json jc = Json::array();
    for (const auto& c : calls) {
      jc.push_back({{"step", c.step}, {"op", c.op}, {"relevant", c.relevant}});
    }
    out << Json{{"predicates", jp},
                {"calls", jc},
                {"visited_change_states", visited},
                {"relevant_change_states", relevant}}
               .dump(2)
        << '\n';
    return kExitOk;
  }
  out << std::left << std::setw(16) << "predicate" << std::setw(30)
      << "condition variables" << std::setw(7) << "trace"
      << "non-idempotent calls\n";
  for (const auto& p : preds) {
    bool here = on_trace.count(p.predicate) > 0;
    if (relevant_only && sc == ControlScope::kTrace && !here) continue;
    std::string vars, ops;
    for (const auto& v : p.cond_vars) vars += (vars.empty() ? "" : ", ") + v;
    for (const auto& o : p.ops) ops += (ops.empty() ? "" : ", ") + o;
    out << std::left << std::setw(16) << p.predicate << std::setw(30) << vars
        << std::setw(7) << (here ? "yes" : "no") << (ops.empty() ? "-" : ops)
        << '\n';
  }
  out << "\nnon-idempotent calls on trace: " << calls.size() << ", relevant: "
      << rel_calls << '\n';
  for (const auto& c : calls) {
    if (relevant_only && !c.relevant) continue;
    out << "  step " << std::setw(3) << (c.step + 1) << "  " << c.op
        << (c.relevant ? "  relevant" : "") << '\n';
  }
  out << "change states visited: " << visited.size()
      << ", relevant: " << relevant.size() << '\n';
  return kExitOk;
}

int cmd_plan(const Globals& g, const std::string& trace_path, std::size_t k,
             const PlanFlags& f, const std::string& report, std::ostream& out) {
  Loaded l = load_trace(trace_path, g);
  if (!l.file.violation) {
    throw Error("NoViolation", "trace '" + trace_path + "' has no violation");
  }
  Row row;
  row.scenario = l.file.scenario.empty()
                     ? std::string("-")
                     : std::filesystem::path(l.file.scenario).stem().string();
  auto plans = plan_once(l.model, l.file.trace, *l.file.violation, k, f, row);
  if (report == "table") {
    print_rows(out, {row}, g);
  } else {
    print_plans(out, plans, *l.model.lts, g);
  }
  return kExitOk;
}

int cmd_table(const Globals& g, const std::string& wf, const std::string& props,
              const std::string& scn, std::size_t kmin, std::size_t kmax,
              std::size_t kstep, const PlanFlags& f, std::ostream& out) {
  Model m = load_model(wf, props, g);
  Run run(m.lts, m.monitors, load_scenario(scn));
  run.Advance();
  std::vector<Row> rows;
  if (kstep == 0) throw Error("InvalidArgument", "--k-step must be positive");
  if (kmin <= kmax) {
    if (!run.violation()) {
      throw Error("NoViolation", "scenario '" + scn + "' ends without violation");
    }
    for (std::size_t k = std::max<std::size_t>(kmin, 1); k <= kmax; k += kstep) {
      Row row;
      row.scenario = std::filesystem::path(scn).stem().string();
      plan_once(m, run.trace(), *run.violation(), k, f, row);
      rows.push_back(row);
    }
  }
  print_rows(out, rows, g);
  return kExitOk;
}

int cmd_oracle(const Globals& g, std::size_t cases, std::size_t kmax,
               std::size_t max_states, bool corrupt, std::ostream& out) {
  std::mt19937_64 rng(g.seed);
  RandomLtsOptions opts;
  opts.max_states = std::min<std::size_t>(max_states, 12);
  EnumerateOptions eo;
  if (corrupt) {
    eo.blocking_hook = [](Clause& c) {
      if (c.size() > 1) c.resize(1);
    };
  }
  std::size_t comparisons = 0, mismatches = 0, plans_seen = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    auto lts = std::make_shared<const Lts>(random_lts(rng, opts));
    for (std::size_t k = 1; k <= kmax; ++k) {
      PlanningProblem p = random_liveness_problem(rng, lts, k, 6);
      auto sat = enumerate(p, eo);
      auto dfs = dfs_plans(p);
      std::set<std::vector<std::size_t>> a, b;
      for (const auto& x : sat) a.insert(plan_key(x));
      for (const auto& x : dfs) b.insert(plan_key(x));
      ++comparisons;
      plans_seen += dfs.size();
      if (a != b || a.size() != sat.size()) {
        ++mismatches;
        Json detail{{"case", i},
                    {"k", k},
                    {"sat_plans", sat.size()},
                    {"dfs_plans", dfs.size()},
                    {"trace", p.trace.steps},
                    {"candidates", p.candidates},
                    {"model", to_json(*lts)}};
        out << "mismatch: " << detail.dump() << '\n';
      }
    }
  }
  if (g.json()) {
    out << Json{{"cases", cases},
                {"comparisons", comparisons},
                {"plans", plans_seen},
                {"mismatches", mismatches}}
               .dump(2)
        << '\n';
  } else {
    out << "oracle-check: " << cases << " models, " << comparisons
        << " comparisons, " << plans_seen << " plans, " << mismatches
        << " mismatches\n";
  }
  return mismatches ? kExitMismatch : kExitOk;
}

int cmd_serve(const std::string& host, int port, const std::string& fixtures,
              std::ostream& out) {
  ServiceConfig cfg;
  cfg.fixtures_dir = fixtures;
  Service service(cfg);
  httplib::Server server;
  service.mount(server);
  out << "compass service listening on " << host << ':' << port << std::endl;
  if (!server.listen(host, port)) {
    throw Error("IoError", "cannot listen on " + host + ":" + std::to_string(port));
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"compass: runtime monitoring and recovery for workflows"};
  app.set_version_flag("--version", "compass 1.0.0");
  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomized commands");
  app.add_option("--max-states", g.max_states, "State cap for translation");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "machine-readable"}));
  app.require_subcommand(1);

  std::string wf, props, scn, trace_path, emit, scope = "trace", report = "plans";
  bool stats_flag = false, pretty = false, relevant_only = false;
  std::size_t k = 10, kmin = 5, kmax = 30, kstep = 5;
  PlanFlags pf;

  auto* compile = app.add_subcommand("compile", "Translate a workflow to its LTS");
  compile->add_option("workflow", wf, "Workflow file")->required();
  compile->add_option("--emit", emit, "Write the LTS as JSON");
  compile->add_flag("--stats", stats_flag, "Print model statistics (default)");
  compile->add_flag("--pretty", pretty, "Print the canonical workflow text");

  auto* monitors = app.add_subcommand("monitors", "Compile property monitors");
  monitors->add_option("properties", props, "Property file")->required();
  std::string emit_fmt;
  monitors->add_option("--emit", emit_fmt, "Emit format")
      ->check(CLI::IsMember({"dot", "json"}));

  auto* run = app.add_subcommand("run", "Execute a scenario");
  run->add_option("workflow", wf)->required();
  run->add_option("properties", props)->required();
  run->add_option("scenario", scn)->required();
  run->add_option("--trace", trace_path, "Write the trace file");

  auto* analyze = app.add_subcommand("analyze", "Data dependency analysis");
  analyze->add_option("workflow", wf, "Workflow file (defaults to the trace's)");
  analyze->add_option("--trace", trace_path)->required();
  analyze->add_flag("--relevant", relevant_only, "Only relevant entries");
  analyze->add_option("--relevance-scope", scope)
      ->check(CLI::IsMember({"trace", "model"}));

  auto add_plan_flags = [&](CLI::App* c) {
    c->add_flag("--relevant", pf.relevant, "Only relevant change states");
    c->add_flag("--filter-forbidden", pf.filter, "Drop plans violating safety");
    c->add_option("--relevance-scope", pf.scope)
        ->check(CLI::IsMember({"trace", "model"}));
    c->add_option("--n", pf.n, "Maximum plans or 'all'");
  };
  auto* plan = app.add_subcommand("plan", "Generate recovery plans");
  plan->add_option("--trace", trace_path)->required();
  plan->add_option("--k", k, "Maximum plan length");
  plan->add_option("--report", report)->check(CLI::IsMember({"plans", "table"}));
  add_plan_flags(plan);

  auto* table = app.add_subcommand("table", "Plan counts over a range of k");
  table->add_option("workflow", wf)->required();
  table->add_option("properties", props)->required();
  table->add_option("scenario", scn)->required();
  table->add_option("--k-min", kmin);
  table->add_option("--k-max", kmax);
  table->add_option("--k-step", kstep);
  add_plan_flags(table);

  std::size_t cases = 20, okmax = 8, ostates = 12;
  bool corrupt = false;
  auto* oracle = app.add_subcommand("oracle-check",
                                    "Compare SAT enumeration with explicit search");
  oracle->add_option("--cases", cases);
  oracle->add_option("--k-max", okmax);
  oracle->add_option("--states", ostates);
  oracle->add_flag("--corrupt-blocking", corrupt,
                   "Weaken blocking clauses to exercise the checker");

  std::string host = "0.0.0.0", fixtures = "fixtures";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--fixtures", fixtures);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compile) return cmd_compile(g, wf, emit, pretty, out);
    if (*monitors) {
      Globals mg = g;
      if (emit_fmt == "json") mg.format = "machine-readable";
      return cmd_monitors(mg, props, emit_fmt == "dot", out);
    }
    if (*run) return cmd_run(g, wf, props, scn, trace_path, out);
    if (*analyze) return cmd_analyze(g, wf, trace_path, relevant_only, scope, out);
    if (*plan) return cmd_plan(g, trace_path, k, pf, report, out);
    if (*table) return cmd_table(g, wf, props, scn, kmin, kmax, kstep, pf, out);
    if (*oracle) return cmd_oracle(g, cases, okmax, ostates, corrupt, out);
    if (*serve) return cmd_serve(host, port, fixtures, out);
  } catch (const Error& e) {
    err << "error [" << e.code() << "]: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return kExitUsage;
}

}  // namespace compass
