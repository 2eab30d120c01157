// Copyright 2026 The dpolo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpolo/audit.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dpolo/errors.h"
#include "dpolo/noise.h"

namespace dpolo {
namespace {

TEST(NoiseDistributionTest, TargetsDepthTimesBaseVariance) {
  NoiseDistributionRequest request;
  request.horizon = 8;
  request.spec = NoiseSpec::Laplace(1.0, 2);
  request.samples = 50000;
  request.seed = 1;
  const NoiseDistributionReport report = NoiseDistributionTest(request);
  ASSERT_EQ(report.rounds.size(), 3u);
  EXPECT_EQ(report.depth, 3);
  for (const RoundNoiseCheck& r : report.rounds) {
    EXPECT_DOUBLE_EQ(r.target_variance, 6.0);
    EXPECT_TRUE(r.variance_ok) << "round " << r.round;
    EXPECT_TRUE(r.ks_ok) << "round " << r.round;
  }
  EXPECT_EQ(report.rounds[0].cover_size, 1);
  EXPECT_EQ(report.rounds[1].cover_size, 1);
  EXPECT_TRUE(report.passed);

  request.horizon = 512;
  request.spec = NoiseSpec::Laplace(1.0, 1);
  request.samples = 10000;
  for (const RoundNoiseCheck& r : NoiseDistributionTest(request).rounds) {
    EXPECT_DOUBLE_EQ(r.target_variance, 18.0);
  }
}

TEST(NoiseDistributionTest, MissingTopUpIsCaught) {
  NoiseDistributionRequest request;
  request.horizon = 8;
  request.samples = 50000;
  request.tree.topup_enabled = false;
  const NoiseDistributionReport report = NoiseDistributionTest(request);
  EXPECT_FALSE(report.passed);
  EXPECT_FALSE(report.rounds[0].variance_ok);
}

TEST(NoiseDistributionTest, RejectsTinySamples) {
  NoiseDistributionRequest request;
  request.samples = 9999;
  EXPECT_THROW(NoiseDistributionTest(request), ContractError);
}

TEST(NoiseDistributionTest, SerialAndParallelAgree) {
  NoiseDistributionRequest request;
  request.horizon = 4;
  request.samples = 10000;
  request.seed = 11;
  request.execution = Execution::kSerial;
  const auto serial = ToJson(NoiseDistributionTest(request));
  request.execution = Execution::kParallel;
  EXPECT_EQ(serial, ToJson(NoiseDistributionTest(request)));
}

TEST(LaplaceTailTest, DefaultEventIsRare) {
  LaplaceTailRequest request;
  request.samples = 200000;
  const LaplaceTailReport report = LaplaceTailCheck(request);
  EXPECT_DOUBLE_EQ(report.target, 1.0 / 64.0);
  EXPECT_NEAR(report.threshold, 10.0 * std::pow(std::log(32.0), 2), 1e-9);
  EXPECT_TRUE(report.passed);
  EXPECT_LE(report.frequency, report.upper_bound);
}

TEST(LaplaceTailTest, OneCoordinateMatchesClosedForm) {
  // P(|Z| >= lambda sqrt(c) ln T) = T^(-sqrt(c)).
  LaplaceTailRequest request;
  request.lambda = 2.0;
  request.dim = 1;
  request.horizon = 8;
  request.samples = 100000;
  request.threshold_constant = 0.1;
  request.seed = 9;
  const LaplaceTailReport report = LaplaceTailCheck(request);
  const double exact = std::pow(8.0, -std::sqrt(0.1));
  const double se = std::sqrt(exact * (1 - exact) / request.samples);
  EXPECT_NEAR(report.frequency, exact, 4 * se);
  EXPECT_FALSE(report.passed);
}

TEST(EmpiricalEpsilonTest, ToyPairStaysNearItsBudget) {
  const EpsilonEstimate est = EmpiricalEpsilon(ToyEpsilonRequest(1.0, 200000, 4));
  EXPECT_LE(est.epsilon_hat, 1.3);
  EXPECT_GE(est.epsilon_hat, 0.2);
  EXPECT_LE(est.epsilon_lower, est.epsilon_hat);
  EXPECT_EQ(est.counts.size(), est.neighbor_counts.size());
  EXPECT_EQ(est.bin_edges.size() + 1, est.counts.size());
}

TEST(EmpiricalEpsilonTest, IdenticalInputsLookPrivate) {
  EpsilonRequest request = ToyEpsilonRequest(1.0, 200000, 5);
  request.neighbor_losses = request.losses;
  EXPECT_LT(EmpiricalEpsilon(request).epsilon_lower, 0.05);
}

TEST(EmpiricalEpsilonTest, DisabledNoiseIsInfinite) {
  EpsilonRequest request = ToyEpsilonRequest(1.0, 20000, 5);
  request.spec = NoiseSpec::Zero(1);
  const EpsilonEstimate est = EmpiricalEpsilon(request);
  EXPECT_EQ(est.epsilon_hat, std::numeric_limits<double>::infinity());
  EXPECT_EQ(ToJson(est)["epsilon_hat"], "inf");
}

TEST(EmpiricalEpsilonTest, LargerBudgetsLeakMore) {
  const double small = EmpiricalEpsilon(ToyEpsilonRequest(0.5, 200000, 6)).epsilon_hat;
  const double large = EmpiricalEpsilon(ToyEpsilonRequest(2.0, 200000, 6)).epsilon_hat;
  EXPECT_LT(small, large);
}

TEST(EmpiricalEpsilonTest, RejectsFarNeighbors) {
  EpsilonRequest request = ToyEpsilonRequest(1.0, 20000, 5);
  request.neighbor_losses[2] = Vector::Constant(1, 0.5);
  EXPECT_THROW(EmpiricalEpsilon(request), ContractError);
}

}  // namespace
}  // namespace dpolo
