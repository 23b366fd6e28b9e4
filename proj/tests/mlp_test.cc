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

#include "ndqn/mlp.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "grad_check.h"
#include "ndqn/errors.h"

namespace ndqn {
namespace {

TEST(MlpTest, InitShapes) {
  Network net = InitNetwork({3, 80, 80, 5}, Activation::kRelu, 7);
  ASSERT_EQ(net.layers().size(), 3u);
  EXPECT_EQ(net.layers()[0].out, 80u);
  EXPECT_EQ(net.layers()[0].in, 3u);
  EXPECT_EQ(net.layers()[1].out, 80u);
  EXPECT_EQ(net.layers()[1].in, 80u);
  EXPECT_EQ(net.layers()[2].out, 5u);
  EXPECT_EQ(net.layers()[2].in, 80u);
  EXPECT_EQ(net.layers()[2].weights.size(), 400u);
}

TEST(MlpTest, InitIsDeterministicAndBounded) {
  Network a = InitNetwork({3, 80, 80, 5}, Activation::kRelu, 7);
  Network b = InitNetwork({3, 80, 80, 5}, Activation::kRelu, 7);
  EXPECT_EQ(a, b);
  Network c = InitNetwork({3, 80, 80, 5}, Activation::kRelu, 8);
  EXPECT_NE(a, c);
  for (const Layer& layer : a.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (double w : layer.weights) EXPECT_LE(std::abs(w), bound);
    for (double bias : layer.biases) EXPECT_EQ(bias, 0.0);
  }
}

TEST(MlpTest, InvalidDims) {
  EXPECT_THROW(InitNetwork({2}, Activation::kRelu, 1), ConfigError);
  EXPECT_THROW(InitNetwork({2, 3}, Activation::kRelu, 1), ConfigError);
  EXPECT_THROW(InitNetwork({2, 0, 3}, Activation::kRelu, 1), ConfigError);
}

TEST(MlpTest, ZeroNetworkOutputsZero) {
  Network net({4, 6, 6, 3}, Activation::kRelu);
  std::vector<double> out = net.Forward(std::vector<double>{1, -2, 3, 0.5});
  EXPECT_EQ(out, std::vector<double>(3, 0.0));
}

TEST(MlpTest, IdentityChain) {
  Network net({1, 1, 1, 1}, Activation::kRelu);
  for (Layer& layer : net.mutable_layers()) layer.weights[0] = 1.0;
  EXPECT_EQ(net.Forward(std::vector<double>{2.0}), std::vector<double>{2.0});
}

TEST(MlpTest, ForwardMatchesReference) {
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    Network net = InitNetwork({5, 7, 6, 4}, act, 11);
    for (Layer& layer : net.mutable_layers()) {
      for (std::size_t i = 0; i < layer.biases.size(); ++i) {
        layer.biases[i] = 0.01 * static_cast<double>(i) - 0.02;
      }
    }
    std::vector<double> x = {0.3, -0.7, 1.0, 0.0, 0.25};
    std::vector<double> got = net.Forward(x);
    std::vector<double> want = ReferenceForward(net, x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
    EXPECT_EQ(net.Forward(x), got);  // pure
  }
}

TEST(MlpTest, ForwardDimensionMismatch) {
  Network net = InitNetwork({3, 4, 4, 2}, Activation::kRelu, 1);
  EXPECT_THROW(net.Forward(std::vector<double>{1.0, 2.0}), InputError);
  Sample s{{1, 2}, {0, 0}, {1, 1}};
  EXPECT_THROW(net.SgdStep(std::span(&s, 1), {}, LossKind::kSquaredError),
               InputError);
}

TEST(MlpTest, SquaredGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EXPECT_LT(MaxGradientError(LossKind::kSquaredError, seed, Activation::kRelu),
              1e-4);
    EXPECT_LT(MaxGradientError(LossKind::kSquaredError, seed, Activation::kTanh),
              1e-4);
  }
}

TEST(MlpTest, HingeGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    EXPECT_LT(MaxGradientError(LossKind::kHinge, seed, Activation::kRelu), 1e-4);
    EXPECT_LT(MaxGradientError(LossKind::kHinge, seed, Activation::kTanh), 1e-4);
  }
}

TEST(MlpTest, ZeroLossLeavesWeightsUnchanged) {
  Network net = InitNetwork({3, 4, 4, 2}, Activation::kRelu, 3);
  Sample s;
  s.input = {0.1, 0.2, 0.3};
  s.target = net.Forward(s.input);
  s.target[1] += 5.0;  // masked out
  s.mask = {1.0, 0.0};
  Network before = net;
  double loss = net.SgdStep(std::span(&s, 1), {0.1, 0.0, 0}, LossKind::kSquaredError);
  EXPECT_EQ(loss, 0.0);
  EXPECT_EQ(net, before);
}

TEST(MlpTest, ZeroLearningRateIsBitIdentical) {
  std::mt19937_64 rng(4);
  Network net = InitNetwork({3, 4, 4, 2}, Activation::kRelu, 4);
  Network before = net;
  auto batch = RandomBatch(rng, LossKind::kSquaredError, 8);
  net.SgdStep(batch, {0.0, 0.0, 0}, LossKind::kSquaredError);
  EXPECT_EQ(net, before);
}

TEST(MlpTest, LearnsLinearSlope) {
  // Least squares on y = 2x has slope exactly 2; the net has unit weights
  // initially so relu is the identity on positive inputs.
  Network net({1, 1, 1}, Activation::kRelu);
  net.mutable_layers()[0].weights[0] = 1.0;
  net.mutable_layers()[1].weights[0] = 1.0;
  std::vector<Sample> data;
  for (int i = 1; i <= 10; ++i) {
    const double x = 0.1 * i;
    data.push_back({{x}, {2.0 * x}, {1.0}});
  }
  double xy = 0.0, xx = 0.0;
  for (const Sample& s : data) {
    xy += s.input[0] * s.target[0];
    xx += s.input[0] * s.input[0];
  }
  const double least_squares_slope = xy / xx;
  for (int step = 0; step < 200; ++step) {
    net.SgdStep(data, {0.05, 0.0, 0}, LossKind::kSquaredError);
  }
  const double slope = net.Forward(std::vector<double>{1.0})[0] -
                       net.Forward(std::vector<double>{0.0})[0];
  EXPECT_NEAR(slope, least_squares_slope, 0.05);
}

TEST(MlpTest, DeterministicTraining) {
  auto run = [] {
    std::mt19937_64 rng(9);
    Network net = InitNetwork({3, 4, 4, 2}, Activation::kRelu, 9);
    for (int i = 0; i < 50; ++i) {
      auto batch = RandomBatch(rng, LossKind::kSquaredError, 4);
      net.SgdStep(batch, {0.05, 1e-4, 0}, LossKind::kSquaredError);
    }
    return net;
  };
  EXPECT_EQ(run(), run());
}

TEST(MlpTest, CloneCopiesAndIsolates) {
  Network src = InitNetwork({3, 5, 5, 2}, Activation::kRelu, 1);
  Network dst = InitNetwork({3, 5, 5, 2}, Activation::kRelu, 2);
  CloneWeights(src, dst);
  std::vector<double> x = {0.5, -0.5, 1.0};
  EXPECT_EQ(src.Forward(x), dst.Forward(x));
  const std::vector<double> frozen = dst.Forward(x);
  Sample s{x, {1.0, 1.0}, {1.0, 1.0}};
  src.SgdStep(std::span(&s, 1), {0.1, 0.0, 0}, LossKind::kSquaredError);
  EXPECT_EQ(dst.Forward(x), frozen);
  EXPECT_NE(src.Forward(x), frozen);

  Network other = InitNetwork({3, 6, 5, 2}, Activation::kRelu, 1);
  EXPECT_THROW(CloneWeights(src, other), InputError);
}

TEST(MlpTest, CheckpointRoundTrip) {
  Network net = InitNetwork({4, 8, 8, 3}, Activation::kTanh, 21);
  std::stringstream buffer;
  net.Save(buffer);
  Network loaded = Network::Load(buffer);
  EXPECT_EQ(loaded, net);
  std::stringstream bad("not-a-net 1");
  EXPECT_THROW(Network::Load(bad), InputError);
}

}  // namespace
}  // namespace ndqn
