// Copyright 2026 The NDQN Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NDQN_SESSION_SERVER_H_
#define NDQN_SESSION_SERVER_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "ndqn/harness.h"

namespace httplib {
class Server;
}

namespace ndqn {

struct CheckpointInfo {
  std::string id;  // directory name under the checkpoint root
  RunConfig config;
};

// Live sessions against trained checkpoints. A checkpoint id names a run
// directory (run.json plus checkpoint/) under `root`. Every method is
// thread-safe; turns within one session are serialised.
class SessionManager {
 public:
  explicit SessionManager(std::string root);
  ~SessionManager();

  std::vector<CheckpointInfo> ListCheckpoints() const;

  // {"session_id", "checkpoint", "turn", "complete"}. The opening turn holds
  // the system's acts up to its first question. NotFoundError on an unknown
  // checkpoint.
  nlohmann::json CreateSession(const std::string& checkpoint_id);
  // Empty text repeats the last prompt without a new turn. Throws
  // NotFoundError for an unknown session, EnvironmentError once the
  // session is complete.
  nlohmann::json PostUserTurn(const std::string& session_id, const std::string& text);
  nlohmann::json Transcript(const std::string& session_id) const;

  std::size_t session_count() const;

 private:
  struct Model;
  struct Session;

  std::shared_ptr<const Model> ModelFor(const std::string& checkpoint_id);
  std::shared_ptr<Session> Find(const std::string& session_id) const;

  std::string root_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Model>> models_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 0;
};

// Routes under /api; see docs/http_api.md.
void RegisterRoutes(httplib::Server& server, SessionManager& sessions);

}  // namespace ndqn

#endif  // NDQN_SESSION_SERVER_H_
