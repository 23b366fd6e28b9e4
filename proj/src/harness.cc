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

#include "ndqn/harness.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "ndqn/errors.h"

namespace ndqn {
namespace {

namespace fs = std::filesystem;

std::string ModeKey(SystemMode mode) {
  return mode == SystemMode::kFlat ? "dqn_flat" : "ndqn";
}

SystemMode ParseModeKey(const std::string& s) {
  if (s == "dqn_flat") return SystemMode::kFlat;
  return ParseSystemMode(s);
}

template <typename T>
T Field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

void RunConfig::Validate() const {
  if (preset != "desk" && preset != "full") {
    throw ConfigError("unknown preset '" + preset + "' (desk or full)");
  }
  if (checkpoint_every == 0) throw ConfigError("checkpoint_every must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

std::string RunConfig::DataDir() const {
  return data_dir.empty() ? DefaultDataDir() : data_dir;
}

FixtureOptions RunConfig::Fixtures() const {
  FixtureOptions o;
  o.catalog = preset;
  return o;
}

SystemConfig RunConfig::System() const {
  SystemConfig c;
  c.mode = mode;
  c.compression = compression;
  c.seed = seed;
  if (preset == "desk") {
    c.hyper.learning_steps = 10000;
    c.hyper.target_sync_period = 1000;
  }
  return c;
}

nlohmann::json RunConfig::ToJson() const {
  return {{"mode", ModeKey(mode)},
          {"compression", CompressionName(compression)},
          {"budget", budget},
          {"seed", seed},
          {"preset", preset},
          {"output_dir", output_dir},
          {"checkpoint_every", checkpoint_every},
          {"data_dir", data_dir}};
}

RunConfig RunConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") {
      c.mode = ParseModeKey(Field<std::string>(j, "mode"));
    } else if (key == "compression") {
      c.compression = ParseCompression(Field<std::string>(j, "compression"));
    } else if (key == "budget") {
      c.budget = Field<std::size_t>(j, "budget");
    } else if (key == "seed") {
      c.seed = Field<std::uint64_t>(j, "seed");
    } else if (key == "preset") {
      c.preset = Field<std::string>(j, "preset");
    } else if (key == "output_dir") {
      c.output_dir = Field<std::string>(j, "output_dir");
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = Field<std::size_t>(j, "checkpoint_every");
    } else if (key == "data_dir") {
      c.data_dir = Field<std::string>(j, "data_dir");
    } else {
      throw ConfigError("unknown run config key '" + key + "'");
    }
  }
  c.Validate();
  return c;
}

RunConfig RunConfig::ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return FromJson(j);
}

Workbench::Workbench(const RunConfig& config)
    : fx(LoadFixtures(config.DataDir(), config.Fixtures())),
      prior(fx, config.compression) {}

RunRecord TrainInMemory(const RunConfig& config, const Workbench& bench) {
  config.Validate();
  DialogueEnv env(bench.fx, bench.prior);
  NdqnSystem sys(bench.fx, bench.prior, config.System());
  return {config, sys.Train(env, {config.budget, config.checkpoint_every})};
}

RunRecord CmdTrain(const RunConfig& config) {
  config.Validate();
  Workbench bench(config);
  DialogueEnv env(bench.fx, bench.prior);
  NdqnSystem sys(bench.fx, bench.prior, config.System());
  RunRecord run{config, sys.Train(env, {config.budget, config.checkpoint_every})};

  fs::create_directories(config.output_dir);
  std::ofstream csv(config.output_dir + "/metrics.csv");
  if (!csv) throw InputError("cannot write " + config.output_dir + "/metrics.csv");
  run.log.WriteCsv(csv);
  std::ofstream meta(config.output_dir + "/run.json");
  meta << config.ToJson().dump(2) << '\n';
  sys.Save(config.output_dir + "/checkpoint");
  return run;
}

RunRecord LoadRun(const std::string& run_dir) {
  RunRecord run;
  run.config = RunConfig::ReadFile(run_dir + "/run.json");
  std::ifstream csv(run_dir + "/metrics.csv");
  if (!csv) throw NotFoundError("cannot open " + run_dir + "/metrics.csv");
  run.log = TrainingLog::ReadCsv(csv);
  return run;
}

EvalResult CmdEval(const std::string& run_dir, int episodes, std::uint64_t seed) {
  if (episodes < 0) throw InputError("episodes must be >= 0");
  const RunConfig config = RunConfig::ReadFile(run_dir + "/run.json");
  Workbench bench(config);
  NdqnSystem sys(bench.fx, bench.prior, config.System());
  sys.Load(run_dir + "/checkpoint");
  DialogueEnv env(bench.fx, bench.prior);
  return sys.Evaluate(env, episodes, seed);
}

nlohmann::json CompareReport::ToJson() const {
  return {{"budget", budget},
          {"elapsed_a", elapsed_a},
          {"elapsed_b", elapsed_b},
          {"speedup", speedup},
          {"delta_avg_reward", delta_reward},
          {"delta_avg_task_success", delta_success},
          {"delta_avg_dialogue_length", delta_length},
          {"success_preserved", success_preserved}};
}

CompareReport CmdCompare(const RunRecord& a, const RunRecord& b) {
  if (a.config.budget != b.config.budget) {
    throw ConfigError("budgets differ (" + std::to_string(a.config.budget) + " vs " +
                      std::to_string(b.config.budget) + "); comparison refused");
  }
  if (a.log.rows.empty() || b.log.rows.empty()) {
    throw ConfigError("cannot compare a run without checkpoints");
  }
  const TrainingRow& ra = a.log.rows.back();
  const TrainingRow& rb = b.log.rows.back();
  CompareReport r;
  r.budget = a.config.budget;
  r.elapsed_a = ra.elapsed_seconds;
  r.elapsed_b = rb.elapsed_seconds;
  r.speedup = ra.elapsed_seconds > 0 ? rb.elapsed_seconds / ra.elapsed_seconds : 1.0;
  r.delta_reward = ra.avg_reward - rb.avg_reward;
  r.delta_success = ra.avg_success - rb.avg_success;
  r.delta_length = ra.avg_length - rb.avg_length;
  r.success_preserved = std::abs(r.delta_success) <= kSuccessTolerance;
  return r;
}

TrendTest MannKendall(std::span<const double> x) {
  TrendTest t;
  const std::size_t n = x.size();
  if (n < 2) return t;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      t.s += (x[j] > x[i]) - (x[j] < x[i]);
    }
  }
  std::map<double, int> groups;
  for (double v : x) ++groups[v];
  const double nn = static_cast<double>(n);
  t.variance = nn * (nn - 1) * (2 * nn + 5);
  for (const auto& [v, k] : groups) {
    if (k > 1) t.variance -= k * (k - 1.0) * (2.0 * k + 5);
  }
  t.variance /= 18.0;
  if (t.variance <= 0) return t;
  const double sd = std::sqrt(t.variance);
  if (t.s > 0) t.z = (t.s - 1) / sd;
  if (t.s < 0) t.z = (t.s + 1) / sd;
  // Upper tail of the standard normal.
  auto upper = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
  t.p_two_sided = std::min(1.0, 2.0 * upper(std::abs(t.z)));
  t.p_upward = upper(t.z);
  return t;
}

RewardTrend EpisodeRewardTrend(const TrainingLog& log, double fraction) {
  RewardTrend out;
  const std::size_t n = log.episodes.size();
  if (n == 0) return out;
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(n * fraction));
  for (std::size_t i = 0; i < k; ++i) {
    out.first += log.episodes[i].reward;
    out.last += log.episodes[n - k + i].reward;
  }
  out.first /= k;
  out.last /= k;
  return out;
}

EvalResult RandomPolicyBaseline(DialogueEnv& env, int episodes, std::uint64_t seed) {
  EvalResult out;
  Rng rng(seed);
  for (int i = 0; i < episodes; ++i) {
    env.Reset(rng);
    double reward = 0.0;
    int length = 0;
    while (!env.state().terminal) {
      const std::vector<ActionId> allowed = env.ConstrainedActions();
      std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
      reward += env.Step(allowed[pick(rng)], rng).reward.total;
      ++length;
    }
    out.avg_reward += reward;
    out.avg_success += env.TaskSuccess();
    out.avg_length += length;
  }
  out.episodes = episodes;
  if (episodes > 0) {
    out.avg_reward /= episodes;
    out.avg_success /= episodes;
    out.avg_length /= episodes;
  }
  return out;
}

}  // namespace ndqn
