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

#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "httplib.h"
#include "ndqn/errors.h"

namespace ndqn {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class SessionTest : public ::testing::Test {
 protected:
  // The trained run is cached in the build tree and reused while it loads.
  static void SetUpTestSuite() {
    root_ = new fs::path(NDQN_TEST_RUNS_DIR "/session");
    try {
      SessionManager probe(root_->string());
      probe.CreateSession("desk");
    } catch (const std::exception&) {
      fs::remove_all(*root_);
      RunConfig c;
      c.output_dir = (*root_ / "desk").string();
      CmdTrain(c);
    }
    fs::create_directories(*root_ / "not_a_run");
  }
  static void TearDownTestSuite() { delete root_; }

  static std::string Root() { return root_->string(); }

  static fs::path* root_;
};

fs::path* SessionTest::root_ = nullptr;

bool IsQuestion(const std::string& act) {
  for (const char* prefix : {"Request(", "Apology(", "AskFor("}) {
    if (act.starts_with(prefix)) return true;
  }
  return false;
}

TEST_F(SessionTest, ListsTrainedRunsOnly) {
  SessionManager m(Root());
  auto list = m.ListCheckpoints();
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].id, "desk");
  EXPECT_EQ(list[0].config.mode, SystemMode::kNdqn);
  EXPECT_TRUE(SessionManager("/nonexistent").ListCheckpoints().empty());
}

TEST_F(SessionTest, OpeningGreetsAndAsksHowToHelp) {
  SessionManager m(Root());
  json s = m.CreateSession("desk");
  const json& acts = s["turn"]["acts"];
  ASSERT_GE(acts.size(), 2u);
  EXPECT_EQ(acts.front(), "Salutation(greeting)");
  EXPECT_EQ(acts.back(), "Request(hmihy)");
  EXPECT_EQ(s["turn"]["domain"], "meta");
  EXPECT_FALSE(s["complete"].get<bool>());
  EXPECT_EQ(m.Transcript(s["session_id"])["turns"].size(), 1u);
}

TEST_F(SessionTest, UnknownCheckpointOrSessionIsNotFound) {
  SessionManager m(Root());
  EXPECT_THROW(m.CreateSession("nope"), NotFoundError);
  EXPECT_THROW(m.CreateSession("not_a_run"), NotFoundError);
  EXPECT_THROW(m.PostUserTurn("s0", "hello"), NotFoundError);
  EXPECT_THROW(m.Transcript("s0"), NotFoundError);
}

TEST_F(SessionTest, SessionsAreIsolated) {
  SessionManager m(Root());
  const std::string a = m.CreateSession("desk")["session_id"];
  const std::string b = m.CreateSession("desk")["session_id"];
  EXPECT_NE(a, b);
  m.PostUserTurn(a, "i am looking for a hotel in edinburgh");
  EXPECT_EQ(m.Transcript(a)["turns"].size(), 3u);
  EXPECT_EQ(m.Transcript(b)["turns"].size(), 1u);
  EXPECT_EQ(m.session_count(), 2u);
}

TEST_F(SessionTest, HotelRequestMovesToHotels) {
  SessionManager m(Root());
  const std::string id = m.CreateSession("desk")["session_id"];
  json r = m.PostUserTurn(id, "i am looking for a hotel in edinburgh");
  EXPECT_EQ(r["turn"]["domain"], "hotels");
  EXPECT_EQ(r["turn"]["slots"]["h_city"]["value"], "edinburgh");
  EXPECT_EQ(r["turn"]["slots"]["h_city"]["status"], "filled");
}

TEST_F(SessionTest, EmptyTextRepeatsThePrompt) {
  SessionManager m(Root());
  json s = m.CreateSession("desk");
  const std::string id = s["session_id"];
  json r = m.PostUserTurn(id, "   ");
  EXPECT_TRUE(r["turn"]["repeated"].get<bool>());
  EXPECT_EQ(r["turn"]["text"], s["turn"]["text"]);
  EXPECT_EQ(m.Transcript(id)["turns"].size(), 1u);
}

TEST_F(SessionTest, GibberishGetsAQuestion) {
  SessionManager m(Root());
  const std::string id = m.CreateSession("desk")["session_id"];
  json r = m.PostUserTurn(id, "blorf zzzk wibble");
  const std::string first = r["turn"]["acts"].front();
  EXPECT_TRUE(IsQuestion(first)) << first;
  EXPECT_EQ(r["turn"]["domain"], "meta");
}

TEST_F(SessionTest, TranscriptHasTwoTurnsPerExchange) {
  SessionManager m(Root());
  const std::string id = m.CreateSession("desk")["session_id"];
  int exchanges = 0;
  const std::vector<std::string> lines = {
      "i am looking for a hotel in edinburgh", "on the 2nd", "of january",
      "for 2 nights", "yes", "yes", "yes", "no thanks", "no", "no", "no"};
  bool complete = false;
  for (const std::string& line : lines) {
    json r = m.PostUserTurn(id, line);
    ++exchanges;
    complete = r["complete"].get<bool>();
    EXPECT_EQ(m.Transcript(id)["turns"].size(), 2u * exchanges + 1);
    if (complete) break;
  }
  json t = m.Transcript(id);
  const json& turns = t["turns"];
  for (std::size_t i = 0; i < turns.size(); ++i) {
    EXPECT_EQ(turns[i]["speaker"], i % 2 == 0 ? "system" : "user");
  }
  if (complete) {
    EXPECT_TRUE(t["complete"].get<bool>());
    EXPECT_TRUE(turns.back()["terminal"].get<bool>());
    EXPECT_THROW(m.PostUserTurn(id, "hello again"), EnvironmentError);
  }
}

TEST_F(SessionTest, ConcurrentTurnsStaySerialised) {
  SessionManager m(Root());
  const std::string shared = m.CreateSession("desk")["session_id"];
  const std::string other = m.CreateSession("desk")["session_id"];
  auto talk = [&](const std::string& id) {
    for (const char* line : {"i want a hotel", "in york", "on the 3rd"}) {
      try {
        m.PostUserTurn(id, line);
      } catch (const EnvironmentError&) {
        return;  // the policy closed the dialogue
      }
    }
  };
  std::thread t1(talk, shared), t2(talk, shared), t3(talk, other);
  t1.join();
  t2.join();
  t3.join();
  for (const std::string& id : {shared, other}) {
    const json turns = m.Transcript(id)["turns"];
    EXPECT_EQ(turns.size() % 2, 1u);
    for (std::size_t i = 0; i < turns.size(); ++i) {
      EXPECT_EQ(turns[i]["speaker"], i % 2 == 0 ? "system" : "user");
    }
  }
}

TEST_F(SessionTest, HttpRoutes) {
  SessionManager m(Root());
  httplib::Server server;
  RegisterRoutes(server, m);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto list = client.Get("/api/checkpoints");
  ASSERT_TRUE(list);
  EXPECT_EQ(list->status, 200);
  EXPECT_EQ(json::parse(list->body)["checkpoints"][0]["id"], "desk");

  auto bad = client.Post("/api/sessions", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto missing = client.Post("/api/sessions", R"({"checkpoint":"ghost"})", "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_TRUE(json::parse(missing->body).contains("error"));

  auto created = client.Post("/api/sessions", R"({"checkpoint":"desk"})", "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["session_id"];
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");

  auto turn = client.Post("/api/sessions/" + id + "/turns",
                          R"({"text":"i need a restaurant"})", "application/json");
  ASSERT_TRUE(turn);
  EXPECT_EQ(turn->status, 200);
  EXPECT_EQ(json::parse(turn->body)["turn"]["speaker"], "system");

  auto transcript = client.Get("/api/sessions/" + id + "/transcript");
  ASSERT_TRUE(transcript);
  EXPECT_EQ(transcript->status, 200);
  EXPECT_EQ(json::parse(transcript->body)["turns"].size(), 3u);

  auto ghost = client.Get("/api/sessions/ghost/transcript");
  ASSERT_TRUE(ghost);
  EXPECT_EQ(ghost->status, 404);

  server.stop();
  serving.join();
}

}  // namespace
}  // namespace ndqn
