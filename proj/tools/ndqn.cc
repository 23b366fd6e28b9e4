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

// Command-line entry point: train, eval, compare and serve.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "httplib.h"
#include "ndqn/errors.h"
#include "ndqn/harness.h"
#include "ndqn/session_server.h"

namespace {

using ndqn::RunConfig;

struct TrainFlags {
  std::string config_file;
  std::string mode;
  std::string compression;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string preset;
  std::string out;
  std::size_t checkpoint_every = 0;
  std::string data;
};

// Flags given on the command line win over the config file.
RunConfig BuildConfig(const CLI::App& cmd, const TrainFlags& f) {
  RunConfig c = f.config_file.empty() ? RunConfig{} : RunConfig::ReadFile(f.config_file);
  if (cmd.count("--mode")) c.mode = f.mode == "dqn_flat" ? ndqn::SystemMode::kFlat
                                                         : ndqn::ParseSystemMode(f.mode);
  if (cmd.count("--compression")) c.compression = ndqn::ParseCompression(f.compression);
  if (cmd.count("--budget")) c.budget = f.budget;
  if (cmd.count("--seed")) c.seed = f.seed;
  if (cmd.count("--preset")) c.preset = f.preset;
  if (cmd.count("--out")) c.output_dir = f.out;
  if (cmd.count("--checkpoint-every")) c.checkpoint_every = f.checkpoint_every;
  if (cmd.count("--data")) c.data_dir = f.data;
  c.Validate();
  return c;
}

int Train(const CLI::App& cmd, const TrainFlags& f) {
  const RunConfig c = BuildConfig(cmd, f);
  const ndqn::RunRecord run = ndqn::CmdTrain(c);
  nlohmann::json out = {{"config", c.ToJson()}, {"checkpoints", run.log.rows.size()}};
  if (!run.log.rows.empty()) {
    const ndqn::TrainingRow& r = run.log.rows.back();
    out["final"] = {{"step", r.step},
                    {"episodes", r.episodes},
                    {"avg_reward", r.avg_reward},
                    {"avg_task_success", r.avg_success},
                    {"avg_dialogue_length", r.avg_length},
                    {"elapsed_seconds", r.elapsed_seconds}};
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int Eval(const std::string& run_dir, int episodes, std::uint64_t seed) {
  const ndqn::EvalResult r = ndqn::CmdEval(run_dir, episodes, seed);
  nlohmann::json out = {{"episodes", r.episodes}};
  if (r.episodes > 0) {
    out["avg_reward"] = r.avg_reward;
    out["avg_task_success"] = r.avg_success;
    out["avg_dialogue_length"] = r.avg_length;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int Compare(const std::string& a, const std::string& b) {
  const ndqn::CompareReport r = ndqn::CmdCompare(ndqn::LoadRun(a), ndqn::LoadRun(b));
  std::cout << r.ToJson().dump(2) << '\n';
  return 0;
}

int Serve(const std::string& root, const std::string& host, int port) {
  ndqn::SessionManager sessions(root);
  if (sessions.ListCheckpoints().empty()) {
    std::cerr << "warning: no trained runs under " << root << '\n';
  }
  httplib::Server server;
  ndqn::RegisterRoutes(server, sessions);
  std::cerr << "serving " << root << " on http://" << host << ':' << port << '\n';
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network of deep Q-networks for multi-domain dialogue"};
  app.require_subcommand(1);

  TrainFlags tf;
  CLI::App* train = app.add_subcommand("train", "train a system and write metrics.csv");
  train->add_option("--config", tf.config_file, "JSON run config; flags override it");
  train->add_option("--mode", tf.mode, "ndqn or dqn_flat")
      ->check(CLI::IsMember({"ndqn", "dqn_flat", "flat"}));
  train->add_option("--compression", tf.compression, "raw or delex")
      ->check(CLI::IsMember({"raw", "delex", "compressed"}));
  train->add_option("--budget", tf.budget, "total learning steps");
  train->add_option("--seed", tf.seed, "random seed");
  train->add_option("--preset", tf.preset, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  train->add_option("--out", tf.out, "output directory");
  train->add_option("--checkpoint-every", tf.checkpoint_every, "steps between metric rows");
  train->add_option("--data", tf.data, "fixture directory (default: $NDQN_DATA_DIR)");

  std::string eval_dir;
  int episodes = 200;
  std::uint64_t eval_seed = 7;
  CLI::App* eval = app.add_subcommand("eval", "greedy evaluation of a trained run");
  eval->add_option("run", eval_dir, "run directory written by train")->required();
  eval->add_option("--episodes", episodes, "episodes to play")->check(CLI::NonNegativeNumber);
  eval->add_option("--seed", eval_seed, "goal sampling seed");

  std::string run_a, run_b;
  CLI::App* compare = app.add_subcommand("compare", "compare two runs of equal budget");
  compare->add_option("a", run_a, "first run directory")->required();
  compare->add_option("b", run_b, "second run directory")->required();

  std::string root = "runs", host = "127.0.0.1";
  int port = 8080;
  CLI::App* serve = app.add_subcommand("serve", "HTTP sessions against trained runs");
  serve->add_option("--runs", root, "directory holding run directories");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return Train(*train, tf);
    if (*eval) return Eval(eval_dir, episodes, eval_seed);
    if (*compare) return Compare(run_a, run_b);
    if (*serve) return Serve(root, host, port);
  } catch (const ndqn::NotFoundError& e) {
    std::cerr << "error: " << e.what()
              << "\n(fixtures are read from --data, else $NDQN_DATA_DIR, else "
              << ndqn::DefaultDataDir() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
