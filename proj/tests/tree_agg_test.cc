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

#include "dpolo/tree_agg.h"

#include <bit>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dpolo/errors.h"
#include "dpolo/stats.h"

namespace dpolo {
namespace {

const LossBound kExpertsBound{LossBound::Norm::kLinf, 1.0};

// Losses on a 1/8 grid keep every prefix sum exact in double precision.
Vector GridLoss(std::int64_t t, int dim) {
  Vector l(dim);
  for (int i = 0; i < dim; ++i) {
    l[i] = static_cast<double>(((t * 5 + i * 3) % 17) - 8) / 8.0;
  }
  return l;
}

TEST(CoverTest, SizesAndTopUpsForFourRounds) {
  SeededRng rng(1);
  NoiseTree tree(4, NoiseSpec::Laplace(1.0, 1), kExpertsBound, rng);
  const int want_cover[] = {1, 1, 2, 1};
  const int want_topup[] = {1, 1, 0, 1};
  for (int t = 1; t <= 4; ++t) {
    const PrivateSumEstimate e = tree.InsertAndRelease(Vector::Zero(1), rng);
    EXPECT_EQ(e.round, t);
    EXPECT_EQ(e.cover_size, want_cover[t - 1]) << t;
    EXPECT_EQ(e.topup_count, want_topup[t - 1]) << t;
    EXPECT_EQ(e.cover_size + e.topup_count, tree.depth());
  }
}

TEST(CoverTest, CoverSizeIsPopcount) {
  EXPECT_EQ(CoverSize(3, 4), 2);
  EXPECT_EQ(CoverSize(4, 4), 1);
  EXPECT_EQ(CoverSize(7, 8), 3);
  EXPECT_THROW(CoverSize(0, 4), ContractError);
  EXPECT_THROW(CoverSize(5, 4), ContractError);
  for (std::int64_t t = 1; t <= 300; ++t) {
    const auto nodes = CoverNodes(t);
    EXPECT_EQ(static_cast<int>(nodes.size()), CoverSize(t, 300));
    // Blocks tile [1, t] left to right.
    std::int64_t next = 1;
    for (const auto& [level, index] : nodes) {
      EXPECT_EQ((index << level) + 1, next);
      next = ((index + 1) << level) + 1;
    }
    EXPECT_EQ(next, t + 1);
  }
}

TEST(NoiseTreeTest, ZeroNoiseReleasesExactPrefixSums) {
  const int dim = 2;
  for (std::int64_t horizon = 1; horizon <= 1024; ++horizon) {
    SeededRng rng(horizon);
    NoiseTree tree(horizon, NoiseSpec::Zero(dim), kExpertsBound, rng);
    ASSERT_EQ(tree.initial_estimate().estimate, Vector::Zero(dim));
    Vector sum = Vector::Zero(dim);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const Vector l = GridLoss(t, dim);
      sum += l;
      const PrivateSumEstimate e = tree.InsertAndRelease(l, rng);
      ASSERT_EQ(e.estimate, sum) << "T=" << horizon << " t=" << t;
    }
  }
}

TEST(NoiseTreeTest, InitialEstimateUsesDepthDraws) {
  SeededRng rng(2);
  NoiseTree tree(16, NoiseSpec::Laplace(1.0, 3), kExpertsBound, rng);
  EXPECT_EQ(tree.depth(), 4);
  EXPECT_EQ(rng.draws(), 4u * 3u);
  EXPECT_EQ(tree.initial_estimate().topup_count, 4);

  SeededRng rng1(2);
  NoiseTree single(1, NoiseSpec::Laplace(1.0, 1), kExpertsBound, rng1);
  EXPECT_EQ(single.depth(), 1);
  EXPECT_EQ(rng1.draws(), 1u);
  const PrivateSumEstimate e = single.InsertAndRelease(Vector::Zero(1), rng1);
  EXPECT_EQ(e.cover_size + e.topup_count, 1);
}

TEST(NoiseTreeTest, ReleasedVarianceMatchesDepth) {
  const int runs = 100000;
  std::vector<std::vector<double>> z(8, std::vector<double>(runs));
  SeededRng rng(7);
  for (int r = 0; r < runs; ++r) {
    NoiseTree tree(8, NoiseSpec::Laplace(1.0, 1), kExpertsBound, rng);
    for (int t = 0; t < 8; ++t) {
      z[t][r] = tree.InsertAndRelease(Vector::Zero(1), rng).estimate[0];
    }
  }
  for (int t = 0; t < 8; ++t) {
    EXPECT_NEAR(stats::Variance(z[t]) / 6.0, 1.0, 0.05) << "t=" << t + 1;
  }
}

TEST(NoiseTreeTest, DisabledTopUpCarriesCoverNoiseOnly) {
  SeededRng rng(3);
  NoiseTree tree(8, NoiseSpec::Laplace(1.0, 1), kExpertsBound, rng,
                 TreeOptions{.topup_enabled = false});
  for (int t = 1; t <= 8; ++t) {
    const PrivateSumEstimate e = tree.InsertAndRelease(Vector::Zero(1), rng);
    EXPECT_EQ(e.topup_count, 0);
    EXPECT_EQ(e.estimate, tree.CoverValue());
  }
}

TEST(NoiseTreeTest, NodesPopulateOnlyWhenComplete) {
  const std::int64_t horizon = 13;
  SeededRng rng(4);
  NoiseTree tree(horizon, NoiseSpec::Laplace(1.0, 1), kExpertsBound, rng);
  for (std::int64_t t = 1; t <= horizon; ++t) {
    tree.InsertAndRelease(Vector::Zero(1), rng);
    for (int level = 0; (std::int64_t{1} << level) <= horizon; ++level) {
      for (std::int64_t j = 0; j < (horizon >> level); ++j) {
        const bool complete = ((j + 1) << level) <= t;
        EXPECT_EQ(tree.IsPopulated(level, j), complete)
            << "t=" << t << " node (" << level << ", " << j << ")";
      }
    }
  }
}

TEST(NoiseTreeTest, NodeNoiseNeverChanges) {
  SeededRng rng(5);
  NoiseTree tree(32, NoiseSpec::Laplace(2.0, 2), kExpertsBound, rng);
  tree.InsertAndRelease(Vector::Zero(2), rng);
  tree.InsertAndRelease(Vector::Zero(2), rng);
  const Vector leaf = tree.NodeNoise(0, 0);
  const Vector pair = tree.NodeNoise(1, 0);
  const Vector cover = tree.CoverValue();
  EXPECT_EQ(tree.CoverValue(), cover);
  for (int t = 3; t <= 32; ++t) tree.InsertAndRelease(Vector::Zero(2), rng);
  EXPECT_EQ(tree.NodeNoise(0, 0), leaf);
  EXPECT_EQ(tree.NodeNoise(1, 0), pair);
}

TEST(NoiseTreeTest, ChangedLeafTouchesFewNodes) {
  for (std::int64_t horizon = 1; horizon <= 256; ++horizon) {
    const bool power_of_two = std::has_single_bit(
        static_cast<std::uint64_t>(horizon));
    const int bound = std::bit_width(static_cast<std::uint64_t>(horizon));
    for (std::int64_t t0 = 1; t0 <= horizon; ++t0) {
      // Oracle: compare node sums of two zero-noise trees that differ at t0.
      SeededRng ra(1);
      SeededRng rb(1);
      NoiseTree a(horizon, NoiseSpec::Zero(1), kExpertsBound, ra);
      NoiseTree b(horizon, NoiseSpec::Zero(1), kExpertsBound, rb);
      for (std::int64_t t = 1; t <= horizon; ++t) {
        a.InsertAndRelease(Vector::Zero(1), ra);
        b.InsertAndRelease(Vector::Constant(1, t == t0 ? 1.0 : 0.0), rb);
      }
      int changed = 0;
      for (int level = 0; (std::int64_t{1} << level) <= horizon; ++level) {
        for (std::int64_t j = 0; j < (horizon >> level); ++j) {
          if (a.NodePartialSum(level, j) != b.NodePartialSum(level, j)) {
            ++changed;
          }
        }
      }
      ASSERT_EQ(changed, AffectedNodeCount(t0, horizon));
      // floor(log2 T) + 1 levels exist; only a power of two uses them all.
      ASSERT_LE(changed, bound);
      if (!power_of_two) ASSERT_LE(changed, CeilLog2Horizon(horizon));
    }
  }
  EXPECT_EQ(AffectedNodeCount(1, 8), 4);
  EXPECT_EQ(AffectedNodeCount(8, 8), 4);
  EXPECT_EQ(AffectedNodeCount(8, 9), 4);
  EXPECT_EQ(AffectedNodeCount(9, 9), 1);
}

TEST(NoiseTreeTest, Errors) {
  SeededRng rng(6);
  NoiseTree tree(2, NoiseSpec::Laplace(1.0, 2), kExpertsBound, rng);
  EXPECT_THROW(tree.InsertAndRelease(Vector::Zero(3), rng), ContractError);
  Vector bad = Vector::Zero(2);
  bad[0] = 1.5;
  EXPECT_THROW(tree.InsertAndRelease(bad, rng), PrivacyContractError);
  bad[0] = std::nan("");
  EXPECT_THROW(tree.InsertAndRelease(bad, rng), InputError);
  EXPECT_EQ(tree.rounds_seen(), 0);
  tree.InsertAndRelease(Vector::Zero(2), rng);
  tree.InsertAndRelease(Vector::Zero(2), rng);
  EXPECT_THROW(tree.InsertAndRelease(Vector::Zero(2), rng), ProtocolError);
}

TEST(NoiseTreeTest, BoundNormsPerModel) {
  Vector l(4);
  l << 0.5, -0.5, 0.5, -0.5;
  EXPECT_TRUE(LossBound::ForModel(LossModel::kExperts).Admits(l));
  EXPECT_TRUE(LossBound::ForModel(LossModel::kSphere).Admits(l));
  EXPECT_FALSE(LossBound::ForModel(LossModel::kCube).Admits(l));
}

TEST(NoiseTreeTest, DebugDumpHidesNoiseByDefault) {
  SeededRng rng(8);
  NoiseTree tree(4, NoiseSpec::Laplace(1.0, 1), kExpertsBound, rng);
  tree.InsertAndRelease(Vector::Zero(1), rng);
  tree.InsertAndRelease(Vector::Zero(1), rng);
  const nlohmann::json safe = tree.DebugDump();
  EXPECT_EQ(safe["depth"], 2);
  EXPECT_EQ(safe["rounds_seen"], 2);
  ASSERT_EQ(safe["nodes"].size(), 4u + 2u + 1u);
  for (const auto& node : safe["nodes"]) {
    EXPECT_FALSE(node.contains("noise"));
    EXPECT_FALSE(node.contains("partial_sum"));
  }
  const nlohmann::json unsafe = tree.DebugDump(true);
  int with_noise = 0;
  for (const auto& node : unsafe["nodes"]) {
    if (node.contains("noise")) {
      ++with_noise;
      EXPECT_TRUE(node["populated"].get<bool>());
    }
  }
  EXPECT_EQ(with_noise, 3);
  EXPECT_EQ(unsafe["nodes"][0]["noise"][0].get<double>(),
            tree.NodeNoise(0, 0)[0]);
}

}  // namespace
}  // namespace dpolo
