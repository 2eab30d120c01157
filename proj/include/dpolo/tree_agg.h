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

// Private prefix sums over a binary tree of dyadic blocks. Every release is the
// true prefix sum plus exactly CeilLog2Horizon(T) independent noise draws: the
// noise of the minimal populated cover of [1, t] and fresh top-up draws for
// the remainder.

#ifndef DPOLO_TREE_AGG_H_
#define DPOLO_TREE_AGG_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "dpolo/geometry.h"
#include "dpolo/noise.h"
#include "json.hpp"

namespace dpolo {

// The loss-set bound a stream promises to respect. Privacy scales are derived
// from it, so inputs that exceed it are refused.
struct LossBound {
  enum class Norm { kL1, kL2, kLinf };

  Norm norm = Norm::kLinf;
  double bound = 1.0;

  static LossBound ForModel(LossModel model);

  double Measure(const Vector& loss) const;
  bool Admits(const Vector& loss, double tol = kMembershipTolerance) const {
    return Measure(loss) <= bound + tol;
  }
};

struct PrivateSumEstimate {
  std::int64_t round = 0;
  Vector estimate;
  int cover_size = 0;
  int topup_count = 0;
};

struct TreeOptions {
  // Negative-control hook: when false, releases skip the top-up draws and
  // carry only the cover's noise.
  bool topup_enabled = true;
};

class NoiseTree {
 public:
  // Samples the round-0 estimate (CeilLog2Horizon(T) draws) from rng.
  NoiseTree(std::int64_t horizon, NoiseSpec spec, LossBound bound,
            SeededRng& rng, TreeOptions options = {});

  std::int64_t horizon() const { return horizon_; }
  int depth() const { return depth_; }
  int dim() const { return spec_.dim(); }
  std::int64_t rounds_seen() const { return rounds_seen_; }
  const NoiseSpec& spec() const { return spec_; }

  const PrivateSumEstimate& initial_estimate() const { return initial_; }

  // Consumes l_t for t = rounds_seen() + 1 and releases the private estimate
  // of sum_{s <= t} l_s.
  PrivateSumEstimate InsertAndRelease(const Vector& loss, SeededRng& rng);

  // Noisy value of the minimal cover of [1, rounds_seen()], i.e. the release
  // before top-up. Reading it has no side effects.
  Vector CoverValue() const;

  bool IsPopulated(int level, std::int64_t index) const;
  Vector NodeNoise(int level, std::int64_t index) const;
  Vector NodePartialSum(int level, std::int64_t index) const;

  // Tree layout and populated flags. Partial sums and noise are included only
  // with include_private_values, which exists for tests.
  nlohmann::json DebugDump(bool include_private_values = false) const;

 private:
  std::int64_t NodeSlot(int level, std::int64_t index) const;
  void Populate(int level, std::int64_t index, SeededRng& rng);

  std::int64_t horizon_;
  int depth_;
  int top_level_;
  NoiseSpec spec_;
  LossBound bound_;
  TreeOptions options_;
  std::int64_t rounds_seen_ = 0;
  std::vector<std::int64_t> level_offset_;
  // One column per node, level-major.
  Eigen::MatrixXd partial_sum_;
  Eigen::MatrixXd noise_;
  std::vector<bool> populated_;
  PrivateSumEstimate initial_;
};

// Minimal dyadic cover of [1, t] as (level, index) pairs, largest block first.
std::vector<std::pair<int, std::int64_t>> CoverNodes(std::int64_t t);

// |S| for round t: the number of ones in the binary representation of t.
int CoverSize(std::int64_t t, std::int64_t horizon);

// Number of tree nodes whose partial sum includes leaf t0.
int AffectedNodeCount(std::int64_t t0, std::int64_t horizon);

}  // namespace dpolo

#endif  // DPOLO_TREE_AGG_H_
