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

#include "ndqn/session_server.h"

#include <filesystem>
#include <random>

#include "httplib.h"
#include "ndqn/errors.h"

namespace ndqn {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// System acts per turn before the user must speak; guards against a
// policy that never asks anything.
constexpr int kMaxActsPerTurn = 4;

bool ExpectsReply(const DialogueAct& act) {
  switch (act.type) {
    case ActType::kRequest:
    case ActType::kApology:
    case ActType::kAskFor:
    case ActType::kExpConfirm:
    case ActType::kImpConfirm:
      return true;
    default:
      return false;
  }
}

std::string StatusName(SlotStatus s) {
  switch (s) {
    case SlotStatus::kUnknown:
      return "unknown";
    case SlotStatus::kFilled:
      return "filled";
    case SlotStatus::kConfirmed:
      return "confirmed";
  }
  return "unknown";
}

}  // namespace

struct SessionManager::Model {
  explicit Model(CheckpointInfo i)
      : info(std::move(i)), bench(info.config), system(bench.fx, bench.prior, info.config.System()) {}

  CheckpointInfo info;
  Workbench bench;
  NdqnSystem system;
};

struct SessionManager::Session {
  Session(std::string session_id, std::shared_ptr<const Model> m, std::uint64_t seed)
      : id(std::move(session_id)),
        model(std::move(m)),
        system(model->system),
        env(model->bench.fx, model->bench.prior),
        rng(seed) {
    env.ResetLive();
    system.ClearStack();
    domain = system.InitialDomain(env.state().last);
  }

  json SlotsJson() const {
    json slots = json::object();
    for (const auto& [name, s] : env.state().slots) {
      slots[name] = {{"status", StatusName(s.status)}, {"value", s.value}};
    }
    return slots;
  }

  // Acts until the system has asked something or the dialogue is over.
  json Respond() {
    const FixtureSet& fx = model->bench.fx;
    std::vector<std::string> texts;
    json acts = json::array();
    std::string acting;
    for (int k = 0; k < kMaxActsPerTurn; ++k) {
      const ActionId a = system.GreedyAction(domain, env);
      const DialogueAct& act = fx.catalog.at(a);
      acting = system.config().mode == SystemMode::kFlat ? fx.registry.name(act.domain)
                                                         : fx.registry.name(domain);
      env.SystemTurn(a, rng);
      texts.push_back(env.state().last.system_text);
      acts.push_back(act.Key());
      if (env.state().terminal || ExpectsReply(act)) break;
      Advance();
    }
    std::string text;
    for (const std::string& t : texts) text += (text.empty() ? "" : " ") + t;
    json turn = {{"speaker", "system"}, {"text", text},   {"acts", acts},
                 {"domain", acting},    {"slots", SlotsJson()},
                 {"terminal", env.state().terminal}};
    transcript.push_back(turn);
    last_turn = turn;
    return turn;
  }

  void Advance() {
    if (system.config().mode == SystemMode::kFlat) return;
    domain = system.NextDomain(domain, env.state().last, env.SubdialogueDone(domain),
                               env.state().turn);
  }

  std::string id;
  std::shared_ptr<const Model> model;
  NdqnSystem system;
  DialogueEnv env;
  Rng rng;
  DomainId domain;
  json transcript = json::array();
  json last_turn;
  std::mutex mu;
};

SessionManager::SessionManager(std::string root) : root_(std::move(root)) {}

SessionManager::~SessionManager() = default;

std::vector<CheckpointInfo> SessionManager::ListCheckpoints() const {
  std::vector<CheckpointInfo> out;
  if (!fs::is_directory(root_)) return out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const fs::path dir = entry.path();
    if (!fs::exists(dir / "run.json") || !fs::exists(dir / "checkpoint" / "system.txt")) {
      continue;
    }
    try {
      out.push_back({dir.filename().string(), RunConfig::ReadFile((dir / "run.json").string())});
    } catch (const std::exception&) {
      // Unreadable runs are not offered.
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CheckpointInfo& a, const CheckpointInfo& b) { return a.id < b.id; });
  return out;
}

std::shared_ptr<const SessionManager::Model> SessionManager::ModelFor(
    const std::string& checkpoint_id) {
  {
    std::lock_guard lock(mu_);
    auto it = models_.find(checkpoint_id);
    if (it != models_.end()) return it->second;
  }
  std::optional<CheckpointInfo> info;
  for (CheckpointInfo& c : ListCheckpoints()) {
    if (c.id == checkpoint_id) info = std::move(c);
  }
  if (!info) throw NotFoundError("unknown checkpoint '" + checkpoint_id + "'");
  auto model = std::make_shared<Model>(*info);
  model->system.Load(root_ + "/" + checkpoint_id + "/checkpoint");
  std::lock_guard lock(mu_);
  return models_.emplace(checkpoint_id, std::move(model)).first->second;
}

std::shared_ptr<SessionManager::Session> SessionManager::Find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

json SessionManager::CreateSession(const std::string& checkpoint_id) {
  std::shared_ptr<const Model> model = ModelFor(checkpoint_id);
  std::string id;
  std::uint64_t seed;
  {
    std::lock_guard lock(mu_);
    seed = ++next_id_;
    std::mt19937_64 salt(std::random_device{}());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%llu-%08llx", static_cast<unsigned long long>(seed),
                  static_cast<unsigned long long>(salt() & 0xffffffffULL));
    id = buf;
  }
  auto session = std::make_shared<Session>(id, model, seed);
  json turn;
  {
    std::lock_guard lock(session->mu);
    turn = session->Respond();
  }
  {
    std::lock_guard lock(mu_);
    sessions_.emplace(id, session);
  }
  return {{"session_id", id},
          {"checkpoint", checkpoint_id},
          {"turn", turn},
          {"complete", turn["terminal"]}};
}

json SessionManager::PostUserTurn(const std::string& session_id, const std::string& text) {
  std::shared_ptr<Session> s = Find(session_id);
  std::lock_guard lock(s->mu);
  if (s->env.state().terminal) throw EnvironmentError("session is complete");
  const bool blank = Tokenize(text).empty();
  if (blank) {
    json turn = s->last_turn;
    turn["repeated"] = true;
    return {{"session_id", session_id}, {"turn", turn}, {"complete", false}};
  }
  s->env.UserTurn(text, 1.0);
  s->transcript.push_back({{"speaker", "user"}, {"text", text}});
  s->Advance();
  json turn = s->Respond();
  return {{"session_id", session_id}, {"turn", turn}, {"complete", turn["terminal"]}};
}

json SessionManager::Transcript(const std::string& session_id) const {
  std::shared_ptr<Session> s = Find(session_id);
  std::lock_guard lock(s->mu);
  return {{"session_id", session_id},
          {"checkpoint", s->model->info.id},
          {"complete", s->env.state().terminal},
          {"turns", s->transcript}};
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

namespace {

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `fn` and maps library errors onto HTTP statuses.
template <typename Fn>
void Guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const json::exception& e) {
    Reply(res, 400, {{"error", std::string("bad request: ") + e.what()}});
  } catch (const InputError& e) {
    Reply(res, 400, {{"error", e.what()}});
  } catch (const NotFoundError& e) {
    Reply(res, 404, {{"error", e.what()}});
  } catch (const EnvironmentError& e) {
    Reply(res, 409, {{"error", e.what()}});
  } catch (const std::exception& e) {
    Reply(res, 500, {{"error", e.what()}});
  }
}

json BodyObject(const httplib::Request& req) {
  json body = req.body.empty() ? json::object() : json::parse(req.body);
  if (!body.is_object()) throw InputError("request body must be a JSON object");
  return body;
}

}  // namespace

void RegisterRoutes(httplib::Server& server, SessionManager& sessions) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, {{"status", "ok"}});
  });
  server.Get("/api/checkpoints", [&](const httplib::Request&, httplib::Response& res) {
    Guarded(res, [&] {
      json list = json::array();
      for (const CheckpointInfo& c : sessions.ListCheckpoints()) {
        list.push_back({{"id", c.id},
                        {"mode", c.config.ToJson()["mode"]},
                        {"compression", CompressionName(c.config.compression)},
                        {"budget", c.config.budget},
                        {"preset", c.config.preset}});
      }
      Reply(res, 200, {{"checkpoints", list}});
    });
  });
  server.Post("/api/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      const json body = BodyObject(req);
      if (!body.contains("checkpoint") || !body["checkpoint"].is_string()) {
        throw InputError("missing string field 'checkpoint'");
      }
      Reply(res, 201, sessions.CreateSession(body["checkpoint"].get<std::string>()));
    });
  });
  server.Post(R"(/api/sessions/([^/]+)/turns)",
              [&](const httplib::Request& req, httplib::Response& res) {
                Guarded(res, [&] {
                  const json body = BodyObject(req);
                  const std::string text =
                      body.contains("text") ? body["text"].get<std::string>() : "";
                  Reply(res, 200, sessions.PostUserTurn(req.matches[1], text));
                });
              });
  server.Get(R"(/api/sessions/([^/]+)/transcript)",
             [&](const httplib::Request& req, httplib::Response& res) {
               Guarded(res, [&] { Reply(res, 200, sessions.Transcript(req.matches[1])); });
             });
}

}  // namespace ndqn
