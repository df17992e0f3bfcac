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

#ifndef COMPASS_SERVICE_HPP_
#define COMPASS_SERVICE_HPP_

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "compass/io.hpp"

namespace httplib {
class Server;
}

namespace compass {

struct ServiceConfig {
  std::string fixtures_dir = "fixtures";
  std::size_t max_sessions = 64;
  std::chrono::seconds idle_timeout{30 * 60};
  std::chrono::milliseconds max_poll{30000};
};

// HTTP error carried as a problem-details object {status, code, message}.
struct ApiError {
  int status;
  std::string code;
  std::string message;
};

struct Session;
struct FixtureModel;

// In-memory registry of interactive runs behind a JSON-over-HTTP API.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  // Registers every route on `server`.
  void mount(httplib::Server& server);

  // Route bodies; each throws ApiError on client errors.
  Json list_fixtures() const;
  Json create_run(const Json& body);
  Json get_run(const std::string& id);
  Json answer_choice(const std::string& id, const std::string& choice);
  Json get_violation(const std::string& id);
  Json get_plans(const std::string& id, std::size_t k, bool relevant,
                 bool filter, std::size_t n);
  Json execute_plan(const std::string& id, const std::string& plan_id);
  Json get_events(const std::string& id, std::size_t cursor,
                  std::chrono::milliseconds wait);

  std::size_t session_count();

 private:
  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<const FixtureModel> model(const std::string& workflow);
  void evict_idle();

  ServiceConfig config_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<const FixtureModel>> models_;
  std::size_t next_id_ = 1;
};

}  // namespace compass

#endif  // COMPASS_SERVICE_HPP_
