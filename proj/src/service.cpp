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

#include "compass/service.hpp"

#include <algorithm>
#include <condition_variable>
#include <cctype>
#include <filesystem>

#include "compass/dependency.hpp"
#include "compass/errors.hpp"
#include "httplib.h"

namespace compass {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct FixtureModel {
  std::shared_ptr<const WorkflowDef> def;
  std::shared_ptr<const Lts> lts;
  DefUseTable table;
  DependencyRelation rel;
};

struct PlanSet {
  std::string key;
  std::size_t generation = 0;
  Json stats;
  std::vector<Plan> plans;
};

struct Session {
  std::string id;
  std::string workflow;
  std::string properties;
  std::string scenario;
  std::string mode;
  std::shared_ptr<const FixtureModel> model;
  std::unique_ptr<Run> run;
  std::string phase;

  std::vector<Json> events;
  std::size_t synced_log = 0;
  std::map<std::string, PlanSet> plan_cache;
  std::string last_plans;
  std::size_t generation = 0;

  std::mutex mu;
  std::condition_variable cv;
  Clock::time_point last_access = Clock::now();
};

namespace {

const char* phase_of(RunStatus s) {
  switch (s) {
    case RunStatus::kAwaitingChoice:
      return "awaiting-choice";
    case RunStatus::kViolated:
      return "violated";
    case RunStatus::kCompleted:
      return "completed";
    case RunStatus::kRunning:
      break;
  }
  return "running";
}

[[noreturn]] void fail(int status, const std::string& code,
                       const std::string& message) {
  throw ApiError{status, code, message};
}

void set_phase(Session& s, const std::string& phase) {
  if (s.phase == phase) return;
  s.phase = phase;
  s.events.push_back({{"seq", s.events.size()},
                      {"type", "phase"},
                      {"phase", phase}});
}

// Copies new engine log entries and the resulting phase into the session's
// event log, then wakes long-pollers.
void sync(Session& s) {
  const auto& log = s.run->log();
  for (; s.synced_log < log.size(); ++s.synced_log) {
    const LogEntry& e = log[s.synced_log];
    Json ev{{"seq", s.events.size()},
            {"type", to_string(e.kind)},
            {"state", e.state},
            {"event", e.event},
            {"monitors", e.monitors}};
    if (!e.outcome.empty()) ev["outcome"] = e.outcome;
    s.events.push_back(std::move(ev));
  }
  std::string phase = phase_of(s.run->status());
  if (phase == "violated" && s.phase != "violated" && s.run->violation()) {
    s.events.push_back({{"seq", s.events.size()},
                        {"type", "violation"},
                        {"violation", to_json(*s.run->violation())}});
  }
  if (phase == "awaiting-choice" && s.phase != phase) {
    s.events.push_back({{"seq", s.events.size()},
                        {"type", "choice"},
                        {"pending", s.run->pending_choices()}});
  }
  set_phase(s, phase);
  s.cv.notify_all();
}

Json view(const Session& s) {
  const Run& r = *s.run;
  const Lts& lts = r.lts();
  Json monitors = Json::array();
  for (std::size_t i = 0; i < r.monitors().size(); ++i) {
    const Monitor& m = r.monitors()[i];
    MonitorState q = r.monitor_states()[i];
    monitors.push_back({{"name", m.name},
                        {"kind", to_string(m.kind)},
                        {"state", q},
                        {"color", to_string(m.colors[q])}});
  }
  Json j{{"id", s.id},
         {"workflow", s.workflow},
         {"properties", s.properties},
         {"mode", s.mode},
         {"phase", s.phase},
         {"current_state", r.current()},
         {"pending_choices", r.pending_choices()},
         {"trace", r.trace().events(lts)},
         {"monitors", std::move(monitors)},
         {"event_count", s.events.size()}};
  if (!s.scenario.empty()) j["scenario"] = s.scenario;
  if (r.violation()) j["violation"] = to_json(*r.violation());
  return j;
}

std::vector<std::string> stems(const std::string& dir, const std::string& ext) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ext) {
      out.push_back(e.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fixture_path(const std::string& dir, const std::string& id,
                         const std::string& ext, const char* what) {
  bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
  fs::path p = fs::path(dir) / (id + ext);
  if (!ok || !fs::is_regular_file(p)) {
    fail(404, "UnknownFixture", std::string("no ") + what + " '" + id + "'");
  }
  return p.string();
}

bool flag(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return false;
  std::string v = req.get_param_value(name);
  return v == "1" || v == "true" || v == "yes" || v == "on";
}

std::size_t number(const httplib::Request& req, const char* name,
                   std::size_t dflt) {
  if (!req.has_param(name)) return dflt;
  std::string v = req.get_param_value(name);
  if (v == "all") return 0;
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    fail(400, "InvalidParameter",
         std::string("parameter '") + name + "' must be a non-negative integer");
  }
}

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn, int ok_status = 200) {
  return [fn, ok_status](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, ok_status, fn(req));
    } catch (const ApiError& e) {
      reply(res, e.status,
            {{"status", e.status}, {"code", e.code}, {"message", e.message}});
    } catch (const Json::exception& e) {
      reply(res, 400,
            {{"status", 400}, {"code", "BadRequest"}, {"message", e.what()}});
    } catch (const Error& e) {
      reply(res, 422,
            {{"status", 422}, {"code", e.code()}, {"message", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500,
            {{"status", 500}, {"code", "Internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}
Service::~Service() = default;

std::size_t Service::session_count() {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

void Service::evict_idle() {
  const auto now = Clock::now();
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock<std::mutex> lock(it->second->mu, std::try_to_lock);
    if (lock.owns_lock() && now - it->second->last_access > config_.idle_timeout) {
      lock.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::shared_ptr<Session> Service::find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  evict_idle();
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(404, "UnknownRun", "no run '" + id + "'");
  return it->second;
}

std::shared_ptr<const FixtureModel> Service::model(const std::string& workflow) {
  std::string path =
      fixture_path(config_.fixtures_dir, workflow, ".wf", "workflow");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = models_.find(workflow);
    if (it != models_.end()) return it->second;
  }
  auto m = std::make_shared<FixtureModel>();
  auto def = std::make_shared<WorkflowDef>(load_workflow(path));
  m->lts = std::make_shared<const Lts>(build_model(*def));
  m->table = build_defuse(*m->lts, *def);
  m->rel = build_dependencies(*m->lts, m->table);
  m->def = std::move(def);
  std::lock_guard<std::mutex> lock(mu_);
  return models_.emplace(workflow, std::move(m)).first->second;
}

Json Service::list_fixtures() const {
  return Json{{"workflows", stems(config_.fixtures_dir, ".wf")},
              {"properties", stems(config_.fixtures_dir, ".props")},
              {"scenarios", stems(config_.fixtures_dir, ".scn")}};
}

Json Service::create_run(const Json& body) {
  auto s = std::make_shared<Session>();
  s->workflow = body.at("workflow").get<std::string>();
  s->properties = body.value("properties", s->workflow);
  s->mode = body.value("mode", std::string("interactive"));
  if (s->mode != "interactive" && s->mode != "scenario") {
    fail(400, "InvalidMode", "mode must be 'interactive' or 'scenario'");
  }
  Scenario scenario;
  if (s->mode == "scenario") {
    s->scenario = body.at("scenario").get<std::string>();
    scenario = load_scenario(fixture_path(config_.fixtures_dir, s->scenario,
                                          ".scn", "scenario"));
  }
  std::string props_path = fixture_path(config_.fixtures_dir, s->properties,
                                        ".props", "property set");
  s->model = model(s->workflow);
  auto monitors = std::make_shared<std::vector<Monitor>>();
  for (const auto& p : load_properties(props_path)) {
    monitors->push_back(compile(p));
  }
  s->run = std::make_unique<Run>(s->model->lts, monitors, std::move(scenario));
  {
    std::lock_guard<std::mutex> lock(mu_);
    evict_idle();
    if (sessions_.size() >= config_.max_sessions) {
      fail(409, "CapacityExceeded", "too many live runs");
    }
    s->id = "r" + std::to_string(next_id_++);
    sessions_[s->id] = s;
  }
  std::lock_guard<std::mutex> lock(s->mu);
  set_phase(*s, "running");
  s->run->Advance();
  sync(*s);
  return view(*s);
}

Json Service::get_run(const std::string& id) {
  auto s = find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_access = Clock::now();
  return view(*s);
}

Json Service::answer_choice(const std::string& id, const std::string& choice) {
  auto s = find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_access = Clock::now();
  if (s->phase != "awaiting-choice") {
    fail(409, "WrongPhase", "run is " + s->phase + ", not awaiting a choice");
  }
  const auto& pending = s->run->pending_choices();
  if (std::find(pending.begin(), pending.end(), choice) == pending.end()) {
    fail(400, "InvalidChoice", "'" + choice + "' is not a pending choice");
  }
  set_phase(*s, "running");
  s->run->Answer(choice);
  sync(*s);
  return view(*s);
}

Json Service::get_violation(const std::string& id) {
  auto s = find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_access = Clock::now();
  if (s->phase != "violated" || !s->run->violation()) {
    fail(409, "WrongPhase", "run is " + s->phase + ", not violated");
  }
  return to_json(*s->run->violation());
}

Json Service::get_plans(const std::string& id, std::size_t k, bool relevant,
                        bool filter, std::size_t n) {
  auto s = find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_access = Clock::now();
  if (s->phase != "violated") {
    fail(409, "WrongPhase", "run is " + s->phase + ", not violated");
  }
  std::string key = std::to_string(k) + (relevant ? "|r" : "|-") +
                    (filter ? "|f" : "|-") + "|" + std::to_string(n);
  auto it = s->plan_cache.find(key);
  if (it == s->plan_cache.end()) {
    PlanSet set;
    set.key = key;
    set.generation = ++s->generation;
    set.stats = Json::object();
    if (k > 0) {
      const Run& r = *s->run;
      const FixtureModel& m = *s->model;
      std::set<StateId> cands =
          relevant ? relevant_change_states(*m.lts, m.table, m.rel, r.trace())
                   : visited_change_states(*m.lts, r.trace());
      PlanningProblem problem = make_problem(r, std::move(cands), k, n);
      PlanStats st;
      set.plans = generate_plans(problem, {}, &st);
      if (filter) {
        set.plans = filter_forbidden(set.plans, r.trace(), *m.lts, r.monitors());
      }
      set.stats = {{"candidates", st.candidates},
                   {"vars", st.vars},
                   {"clauses", st.clauses},
                   {"seconds", st.seconds}};
    }
    it = s->plan_cache.emplace(key, std::move(set)).first;
  }
  s->last_plans = key;
  const PlanSet& set = it->second;
  Json plans = Json::array();
  for (std::size_t i = 0; i < set.plans.size(); ++i) {
    Json p = to_json(set.plans[i], s->run->lts());
    p["id"] = "g" + std::to_string(set.generation) + "-" + std::to_string(i + 1);
    p["rank"] = i + 1;
    plans.push_back(std::move(p));
  }
  return Json{{"k", k},
              {"relevant", relevant},
              {"filter", filter},
              {"stats", set.stats},
              {"plans", std::move(plans)}};
}

Json Service::execute_plan(const std::string& id, const std::string& plan_id) {
  auto s = find(id);
  std::lock_guard<std::mutex> lock(s->mu);
  s->last_access = Clock::now();
  if (s->phase != "violated") {
    fail(409, "WrongPhase", "run is " + s->phase + ", not violated");
  }
  auto it = s->plan_cache.find(s->last_plans);
  const Plan* chosen = nullptr;
  if (it != s->plan_cache.end()) {
    const PlanSet& set = it->second;
    std::string prefix = "g" + std::to_string(set.generation) + "-";
    if (plan_id.rfind(prefix, 0) == 0) {
      try {
        std::size_t idx = std::stoul(plan_id.substr(prefix.size()));
        if (idx >= 1 && idx <= set.plans.size()) chosen = &set.plans[idx - 1];
      } catch (const std::exception&) {
      }
    }
  }
  if (!chosen) fail(404, "UnknownPlan", "no plan '" + plan_id + "'");
  Plan plan = *chosen;
  s->plan_cache.clear();
  s->last_plans.clear();
  set_phase(*s, "recovering");
  s->events.push_back({{"seq", s->events.size()},
                       {"type", "plan"},
                       {"plan", plan_id},
                       {"actions", plan.labels(s->run->lts())}});
  RunStatus st = compass::execute_plan(*s->run, plan);
  if (st != RunStatus::kViolated) s->run->Advance();
  sync(*s);
  return view(*s);
}

Json Service::get_events(const std::string& id, std::size_t cursor,
                         std::chrono::milliseconds wait) {
  auto s = find(id);
  std::unique_lock<std::mutex> lock(s->mu);
  s->last_access = Clock::now();
  wait = std::min(wait, config_.max_poll);
  s->cv.wait_for(lock, wait, [&] { return s->events.size() > cursor; });
  Json evs = Json::array();
  for (std::size_t i = cursor; i < s->events.size(); ++i) {
    evs.push_back(s->events[i]);
  }
  return Json{{"events", std::move(evs)},
              {"cursor", std::max(cursor, s->events.size())},
              {"phase", s->phase}};
}

void Service::mount(httplib::Server& server) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Get("/fixtures", guarded([this](const httplib::Request&) {
               return list_fixtures();
             }));
  server.Post("/runs", guarded(
                           [this](const httplib::Request& req) {
                             Json body = req.body.empty()
                                             ? Json::object()
                                             : Json::parse(req.body);
                             return create_run(body);
                           },
                           201));
  server.Get(R"(/runs/([^/]+))", guarded([this](const httplib::Request& req) {
               return get_run(req.matches[1]);
             }));
  server.Post(R"(/runs/([^/]+)/choices/([^/]+))",
              guarded([this](const httplib::Request& req) {
                return answer_choice(req.matches[1], req.matches[2]);
              }));
  server.Get(R"(/runs/([^/]+)/violation)",
             guarded([this](const httplib::Request& req) {
               return get_violation(req.matches[1]);
             }));
  server.Get(R"(/runs/([^/]+)/plans)",
             guarded([this](const httplib::Request& req) {
               return get_plans(req.matches[1], number(req, "k", 10),
                                flag(req, "relevant"), flag(req, "filter"),
                                number(req, "n", 0));
             }));
  server.Post(R"(/runs/([^/]+)/plans/([^/]+)/execute)",
              guarded([this](const httplib::Request& req) {
                return execute_plan(req.matches[1], req.matches[2]);
              }));
  server.Get(R"(/runs/([^/]+)/events)",
             guarded([this](const httplib::Request& req) {
               return get_events(
                   req.matches[1], number(req, "cursor", 0),
                   std::chrono::milliseconds(number(req, "wait", 0)));
             }));
}

}  // namespace compass
