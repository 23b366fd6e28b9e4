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

#ifndef NDQN_HARNESS_H_
#define NDQN_HARNESS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "json.hpp"

#include "ndqn/dialogue_env.h"
#include "ndqn/fixtures.h"
#include "ndqn/ndqn_controller.h"

namespace ndqn {

// One training run. Presets pick the catalog and the exploration schedule:
// "desk" is the small acceptance-scale setup, "full" the larger catalog.
struct RunConfig {
  SystemMode mode = SystemMode::kNdqn;
  Compression compression = Compression::kDelexSynonym;
  std::size_t budget = 20000;
  std::uint64_t seed = 1;
  std::string preset = "desk";
  std::string output_dir = "runs/default";
  std::size_t checkpoint_every = 1000;
  std::string data_dir;  // empty: DefaultDataDir()

  void Validate() const;
  std::string DataDir() const;
  FixtureOptions Fixtures() const;
  SystemConfig System() const;

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys throw ConfigError.
  static RunConfig FromJson(const nlohmann::json& j);
  static RunConfig ReadFile(const std::string& path);
};

// Fixtures and the action prior for one config, built once.
struct Workbench {
  explicit Workbench(const RunConfig& config);

  FixtureSet fx;
  ActionPrior prior;
};

struct RunRecord {
  RunConfig config;
  TrainingLog log;
};

// Trains and writes metrics.csv, run.json and checkpoint/ under
// config.output_dir. Fixture loading is not part of the timed loop.
RunRecord CmdTrain(const RunConfig& config);
// Same, on an existing workbench and without touching the disk.
RunRecord TrainInMemory(const RunConfig& config, const Workbench& bench);

RunRecord LoadRun(const std::string& run_dir);

// Greedy evaluation of the checkpoint saved under `run_dir`.
EvalResult CmdEval(const std::string& run_dir, int episodes, std::uint64_t seed);

struct CompareReport {
  std::size_t budget = 0;
  double elapsed_a = 0.0;
  double elapsed_b = 0.0;
  double speedup = 1.0;  // elapsed_b / elapsed_a: how much faster A ran
  double delta_reward = 0.0;  // final checkpoint, A minus B
  double delta_success = 0.0;
  double delta_length = 0.0;
  bool success_preserved = true;  // |delta_success| <= tolerance

  nlohmann::json ToJson() const;
};

inline constexpr double kSuccessTolerance = 0.05;

// Throws ConfigError when the budgets differ or a log is empty.
CompareReport CmdCompare(const RunRecord& a, const RunRecord& b);

// Mann-Kendall trend test with the tie-corrected variance and the normal
// approximation (continuity corrected).
struct TrendTest {
  double s = 0.0;
  double variance = 0.0;
  double z = 0.0;
  double p_two_sided = 1.0;
  double p_upward = 1.0;  // one-sided, H1: increasing

  bool SignificantUpward(double alpha = 0.05) const {
    return s > 0 && p_two_sided <= alpha;
  }
};

TrendTest MannKendall(std::span<const double> series);

// Mean episode reward over the first and the last `fraction` of the
// completed episodes.
struct RewardTrend {
  double first = 0.0;
  double last = 0.0;
};
RewardTrend EpisodeRewardTrend(const TrainingLog& log, double fraction = 0.1);

// Uniform choice over the constrained actions, for reference numbers.
EvalResult RandomPolicyBaseline(DialogueEnv& env, int episodes, std::uint64_t seed);

}  // namespace ndqn

#endif  // NDQN_HARNESS_H_
