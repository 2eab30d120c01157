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

// Full-information players that only see the loss stream through private
// prefix-sum estimates: follow-the-regularized-leader and
// follow-the-perturbed-leader.

#ifndef DPOLO_FULL_INFO_H_
#define DPOLO_FULL_INFO_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "dpolo/geometry.h"
#include "dpolo/noise.h"
#include "dpolo/parallel.h"
#include "dpolo/tree_agg.h"

namespace dpolo {

// The observe-then-choose state machine shared by both players. Round t's
// choice may only be made after l_{t-1} has been observed.
class PrivateLeaderStream {
 public:
  PrivateLeaderStream(int dim, std::int64_t horizon, NoiseSpec noise,
                      LossBound bound, SeededRng& rng, TreeOptions options);

  // Feeds l_{t-1} when required and returns the estimate the round-t choice
  // is computed from.
  const Vector& Advance(const std::optional<Vector>& observed_loss,
                        SeededRng& rng);

  std::int64_t round() const { return round_; }
  const PrivateSumEstimate& last_estimate() const { return last_; }
  const NoiseTree& tree() const { return tree_; }

 private:
  NoiseTree tree_;
  PrivateSumEstimate last_;
  std::int64_t round_ = 0;
};

class FtrlPlayer {
 public:
  FtrlPlayer(DecisionSet set, Regularizer reg, double eta,
             std::int64_t horizon, NoiseSpec noise, LossBound bound,
             SeededRng& rng, TreeOptions options = {});

  // Round 1 takes no loss; later rounds require the previous round's loss.
  // Returns argmin_x eta <x, L~_{t-1}> + R(x).
  Vector Step(const std::optional<Vector>& observed_loss, SeededRng& rng);

  const DecisionSet& set() const { return set_; }
  double eta() const { return eta_; }
  std::int64_t round() const { return stream_.round(); }
  const PrivateSumEstimate& last_estimate() const {
    return stream_.last_estimate();
  }

 private:
  DecisionSet set_;
  Regularizer reg_;
  double eta_;
  PrivateLeaderStream stream_;
};

struct FtplOptions {
  // Laplace perturbations carry no regret guarantee here; they are accepted
  // only when this is set.
  bool experimental_laplace = false;
  TreeOptions tree;
};

class FtplPlayer {
 public:
  FtplPlayer(DecisionSet set, std::int64_t horizon, NoiseSpec noise,
             LossBound bound, SeededRng& rng, FtplOptions options = {});

  // Returns argmin_x <x, L~_{t-1}>.
  Vector Step(const std::optional<Vector>& observed_loss, SeededRng& rng);

  const DecisionSet& set() const { return set_; }
  std::int64_t round() const { return stream_.round(); }
  const PrivateSumEstimate& last_estimate() const {
    return stream_.last_estimate();
  }

 private:
  DecisionSet set_;
  PrivateLeaderStream stream_;
};

// Default learning rate. Experts: sqrt(ln N / T) with D_R = ln N. Ball and
// cube with the squared L2 regularizer: sqrt(D_R / (T G^2)) with G = ||Y||_2.
// A zero-range regularizer makes eta irrelevant and returns 1.
double FtrlEtaFor(LossModel model, const SetBounds& bounds, double d_r,
                  std::int64_t horizon);

struct OneShotRequest {
  // Fixed oblivious loss sequence l_1..l_T over the simplex.
  std::vector<Vector> losses;
  double lambda = 1.0;
  // 0 selects FtrlEtaFor(experts).
  double eta = 0.0;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  // The equivalence needs an oblivious adversary; true is refused.
  bool adaptive = false;
  bool zero_noise = false;
  Execution execution = Execution::kParallel;
};

struct OneShotReport {
  double mean_tree = 0.0;
  double mean_one_shot = 0.0;
  double stderr_tree = 0.0;
  double stderr_one_shot = 0.0;
  double difference = 0.0;
  double pooled_stderr = 0.0;
  bool within_three_se = false;
};

// Compares E[sum_t <l_t, x_t>] for entropic FTRL on the experts simplex under
// (a) per-round tree noise and (b) one noise vector Z, distributed as the sum
// of CeilLog2Horizon(T) Laplace draws, fixed before round 1.
OneShotReport OneShotEquivalenceCheck(const OneShotRequest& request);

}  // namespace dpolo

#endif  // DPOLO_FULL_INFO_H_
