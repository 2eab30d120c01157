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

#include "dpolo/noise.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dpolo/errors.h"
#include "dpolo/stats.h"

namespace dpolo {
namespace {

double LaplaceCdf(double x, double lambda) {
  return x < 0.0 ? 0.5 * std::exp(x / lambda)
                 : 1.0 - 0.5 * std::exp(-x / lambda);
}

TEST(SeededRngTest, SameSeedSameSequence) {
  SeededRng a(42);
  SeededRng b(42);
  const NoiseSpec spec = NoiseSpec::Laplace(1.5, 8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(Sample(spec, a), Sample(spec, b));
  const NoiseSpec g = NoiseSpec::Gaussian(2.0, 8);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(Sample(g, a), Sample(g, b));
  EXPECT_EQ(a.draws(), b.draws());
}

TEST(SeededRngTest, DerivedSeedsDifferByTagAndTrial) {
  EXPECT_NE(DeriveSeed(1, 0, "a"), DeriveSeed(1, 0, "b"));
  EXPECT_NE(DeriveSeed(1, 0, "a"), DeriveSeed(1, 1, "a"));
  EXPECT_NE(DeriveSeed(1, 0, "a"), DeriveSeed(2, 0, "a"));
  EXPECT_EQ(DeriveSeed(9, 3, "x"), DeriveSeed(9, 3, "x"));
}

TEST(SeededRngTest, UniformIsOpenAndIndexInRange) {
  SeededRng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.UniformOpen01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    const int k = rng.UniformIndex(7);
    ASSERT_GE(k, 0);
    ASSERT_LT(k, 7);
  }
}

TEST(NoiseSampleTest, LaplaceMomentsAndCdf) {
  SeededRng rng(3);
  const NoiseSpec spec = NoiseSpec::Laplace(1.0, 1000000);
  const Vector z = Sample(spec, rng);
  std::vector<double> xs(z.data(), z.data() + z.size());
  const double mean = stats::Mean(xs);
  const double var = stats::Variance(xs);
  EXPECT_GE(mean, -0.005);
  EXPECT_LE(mean, 0.005);
  EXPECT_GE(var, 1.97);
  EXPECT_LE(var, 2.03);
  const stats::KsResult ks =
      stats::KsOneSample(xs, [](double x) { return LaplaceCdf(x, 1.0); });
  EXPECT_LT(ks.statistic, 0.002);
}

TEST(NoiseSampleTest, GaussianVariance) {
  SeededRng rng(4);
  const Vector z = Sample(NoiseSpec::Gaussian(2.0, 1000000), rng);
  std::vector<double> xs(z.data(), z.data() + z.size());
  const double var = stats::Variance(xs);
  EXPECT_GE(var, 3.95);
  EXPECT_LE(var, 4.05);
}

TEST(NoiseSampleTest, SumOfLaplaceVariance) {
  SeededRng rng(5);
  const NoiseSpec spec = NoiseSpec::Laplace(0.7, 1);
  for (int k : {1, 3, 6}) {
    std::vector<double> xs(100000);
    for (double& x : xs) {
      Vector acc = Vector::Zero(1);
      for (int i = 0; i < k; ++i) AddSample(spec, rng, acc);
      x = acc[0];
    }
    const double target = k * spec.CoordinateVariance();
    EXPECT_NEAR(stats::Variance(xs) / target, 1.0, 0.03) << "k=" << k;
  }
}

TEST(NoiseSampleTest, ZeroSpecDrawsNothing) {
  SeededRng rng(6);
  EXPECT_EQ(Sample(NoiseSpec::Zero(4), rng), Vector::Zero(4));
  EXPECT_EQ(rng.draws(), 0u);
  EXPECT_EQ(NoiseSpec::Zero(4).CoordinateVariance(), 0.0);
}

TEST(NoiseSpecTest, RejectsBadScale) {
  EXPECT_THROW(NoiseSpec::Laplace(0.0, 1), ParameterError);
  EXPECT_THROW(NoiseSpec::Gaussian(-1.0, 1), ParameterError);
  EXPECT_THROW(NoiseSpec::Laplace(1.0, 0), ParameterError);
  EXPECT_DOUBLE_EQ(NoiseSpec::Laplace(3.0, 1).CoordinateVariance(), 18.0);
}

TEST(CeilLog2HorizonTest, Values) {
  EXPECT_EQ(CeilLog2Horizon(1), 1);
  EXPECT_EQ(CeilLog2Horizon(2), 1);
  EXPECT_EQ(CeilLog2Horizon(3), 2);
  EXPECT_EQ(CeilLog2Horizon(4), 2);
  EXPECT_EQ(CeilLog2Horizon(5), 3);
  EXPECT_EQ(CeilLog2Horizon(16), 4);
  EXPECT_EQ(CeilLog2Horizon(1024), 10);
  EXPECT_EQ(CeilLog2Horizon(1025), 11);
}

TEST(LaplaceLambdaTest, Examples) {
  EXPECT_DOUBLE_EQ(LaplaceLambdaFor({1.0, 0.0}, 4.0, 16), 16.0);
  EXPECT_DOUBLE_EQ(LaplaceLambdaFor({2.0, 0.0}, 1.0, 2), 0.5);
  EXPECT_NEAR(LaplaceLambdaFor({0.1, 0.0}, 1.0, 1024), 100.0, 1e-12);
  EXPECT_DOUBLE_EQ(LaplaceLambdaFor({1.0, 0.0}, 10.0, 4096), 120.0);
  EXPECT_THROW(LaplaceLambdaFor({0.0, 0.0}, 1.0, 16), ParameterError);
  EXPECT_THROW(LaplaceLambdaFor({-1.0, 0.0}, 1.0, 16), ParameterError);
  EXPECT_THROW(LaplaceLambdaFor({1.0, 0.0}, 1.0, 1), ParameterError);
}

TEST(GaussianSigmaTest, BranchesByHand) {
  const GaussianSigmaTerms t = GaussianSigmaTermsFor({1.0, 0.1}, 1.0, 4, 16);
  // sqrt(16 / (2 * 4)) and (2 / 1) * 4 * ln(4 / 0.1).
  EXPECT_NEAR(t.regret_branch, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(t.privacy_branch, 8.0 * std::log(40.0), 1e-12);
  EXPECT_DOUBLE_EQ(t.sigma, std::max(t.regret_branch, t.privacy_branch));
  EXPECT_DOUBLE_EQ(GaussianSigmaFor({1.0, 0.1}, 1.0, 4, 16), t.sigma);
}

TEST(GaussianSigmaTest, PrivacyBranchScalesWithInverseEpsilon) {
  const double base = GaussianSigmaTermsFor({1.0, 0.1}, 1.0, 4, 16).privacy_branch;
  const GaussianSigmaTerms small = GaussianSigmaTermsFor({0.01, 0.1}, 1.0, 4, 16);
  EXPECT_NEAR(small.privacy_branch, 100.0 * base, 1e-9);
  EXPECT_DOUBLE_EQ(small.sigma, small.privacy_branch);
}

TEST(GaussianSigmaTest, RegretBranchWinsForLongHorizons) {
  // At N=4, eps=1, delta=0.1 the crossover sits near T = 10^7.
  const GaussianSigmaTerms at_1e6 =
      GaussianSigmaTermsFor({1.0, 0.1}, 1.0, 4, 1000000);
  EXPECT_LT(at_1e6.regret_branch, at_1e6.privacy_branch);
  const GaussianSigmaTerms long_run =
      GaussianSigmaTermsFor({1.0, 0.1}, 1.0, 4, std::int64_t{1} << 26);
  EXPECT_GT(long_run.regret_branch, long_run.privacy_branch);
  EXPECT_DOUBLE_EQ(long_run.sigma, long_run.regret_branch);
}

TEST(GaussianSigmaTest, RejectsPureDp) {
  EXPECT_THROW(GaussianSigmaFor({1.0, 0.0}, 1.0, 4, 16), ParameterError);
  EXPECT_THROW(GaussianSigmaFor({1.0, 1.0}, 1.0, 4, 16), ParameterError);
}

}  // namespace
}  // namespace dpolo
