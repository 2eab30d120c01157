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

#ifndef DPOLO_AUDIT_H_
#define DPOLO_AUDIT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpolo/geometry.h"
#include "dpolo/noise.h"
#include "dpolo/parallel.h"
#include "dpolo/tree_agg.h"
#include "json.hpp"

namespace dpolo {

// Variance and KS comparison of a released coordinate at one round.
struct RoundNoiseCheck {
  std::int64_t round = 0;
  int cover_size = 0;
  double target_variance = 0.0;
  // Worst relative deviation over coordinates.
  double max_relative_error = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  bool variance_ok = false;
  bool ks_ok = false;
};

struct NoiseDistributionRequest {
  std::int64_t horizon = 8;
  NoiseSpec spec = NoiseSpec::Laplace(1.0, 1);
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  double variance_tolerance = 0.05;
  double ks_alpha = 0.01;
  TreeOptions tree;
  Execution execution = Execution::kParallel;
};

struct NoiseDistributionReport {
  std::int64_t horizon = 0;
  int depth = 0;
  std::vector<RoundNoiseCheck> rounds;
  bool passed = false;
};

// Releases of an all-zero stream at t in {1, floor(T/2), T}, compared with
// sums of depth fresh draws. Throws ContractError when samples < 10^4.
NoiseDistributionReport NoiseDistributionTest(
    const NoiseDistributionRequest& request);

struct LaplaceTailRequest {
  double lambda = 1.0;
  int dim = 4;
  std::int64_t horizon = 8;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
  // Event: ||Z||_inf^2 >= c lambda^2 ln^2(T N).
  double threshold_constant = 10.0;
  double confidence = 0.99;
  Execution execution = Execution::kParallel;
};

struct LaplaceTailReport {
  double threshold = 0.0;
  std::int64_t hits = 0;
  std::int64_t samples = 0;
  double frequency = 0.0;
  double upper_bound = 0.0;
  double target = 0.0;
  bool passed = false;
};

LaplaceTailReport LaplaceTailCheck(const LaplaceTailRequest& request);

// Releases of a toy tree mechanism on two neighboring sequences, projected
// to one coordinate of one round.
struct EpsilonRequest {
  std::int64_t horizon = 4;
  NoiseSpec spec = NoiseSpec::Laplace(2.0, 1);
  LossBound bound{LossBound::Norm::kL1, 1.0};
  std::vector<Vector> losses;
  std::vector<Vector> neighbor_losses;
  // 1-based round and coordinate of the projection; round 0 selects T.
  std::int64_t round = 0;
  int coordinate = 0;
  int bins = 64;
  std::int64_t min_bin_count = 50;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  Execution execution = Execution::kParallel;
};

struct EpsilonEstimate {
  // Largest |log(P/P')| over bins with enough mass on both sides; infinite
  // when a well-populated bin is empty under the other input.
  double epsilon_hat = 0.0;
  // The same maximum taken over simultaneous binomial confidence bounds.
  double epsilon_lower = 0.0;
  double confidence = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> neighbor_counts;
  std::vector<std::string> warnings;
};

// Default pair: L = 0 and L' = e_1 in round 1.
EpsilonRequest ToyEpsilonRequest(double epsilon, std::int64_t samples,
                                 std::uint64_t seed);

EpsilonEstimate EmpiricalEpsilon(const EpsilonRequest& request);

nlohmann::json ToJson(const NoiseDistributionReport& report);
nlohmann::json ToJson(const LaplaceTailReport& report);
nlohmann::json ToJson(const EpsilonEstimate& estimate);

}  // namespace dpolo

#endif  // DPOLO_AUDIT_H_
