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

// Game loop, oblivious adversaries, regret accounting and the statistical
// checks that tie simulated runs back to the regret guarantees.

#ifndef DPOLO_SIM_H_
#define DPOLO_SIM_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpolo/bandit.h"
#include "dpolo/geometry.h"
#include "dpolo/noise.h"
#include "dpolo/parallel.h"

namespace dpolo {

enum class AdversaryKind {
  kFixedSequence,
  kStochasticBestArm,
  kSinusoidalDrift,
  kWorstCaseExperts,
};

std::string_view ToString(AdversaryKind kind);
std::optional<AdversaryKind> ParseAdversaryKind(std::string_view name);

// Every kind except kFixedSequence first draws a raw vector in [-1, 1]^N and
// rescales it into the model's loss set (x1 experts, x1/sqrt(N) sphere, x1/N
// cube).
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kWorstCaseExperts;
  LossModel model = LossModel::kExperts;
  int dim = 2;
  // kFixedSequence: cycled through in order; must already lie in the loss
  // set.
  std::vector<Vector> sequence;
  // The favored coordinate of the random kinds.
  int best_arm = 0;
  // kStochasticBestArm: raw losses are Bernoulli(1/2) in {0, 1}; the best
  // arm's mean is 1/2 - gap.
  double gap = 0.2;
  // kWorstCaseExperts: raw losses are uniform +-1; the planted arm has mean
  // -drift.
  double drift = 0.5;
  // kSinusoidalDrift: raw l_i(t) = sin(2 pi t / period + 2 pi i / N).
  double period = 256.0;
};

// Oblivious loss source: the sequence is a deterministic function of (spec,
// seed) and never sees the player's actions.
class Adversary {
 public:
  Adversary(AdversarySpec spec, std::uint64_t seed);

  const AdversarySpec& spec() const { return spec_; }
  // l_t for t = rounds emitted so far + 1. Throws if the loss leaves the set.
  Vector Next();

 private:
  AdversarySpec spec_;
  SeededRng rng_;
  double scale_;
  std::int64_t t_ = 0;
};

// Materializes the first `rounds` losses of an adversary.
std::vector<Vector> GenerateLosses(const AdversarySpec& spec,
                                   std::uint64_t seed, std::int64_t rounds);

// A learner as seen by the game loop. The loop calls Act, then Observe with
// the full loss vector; bandit adapters only pass <l_t, x_t> inward.
class Player {
 public:
  virtual ~Player() = default;
  virtual const Vector& Act(SeededRng& rng) = 0;
  virtual void Observe(const Vector& loss, SeededRng& rng) = 0;
};

using PlayerFactory =
    std::function<std::unique_ptr<Player>(SeededRng& rng)>;

class FtrlPlayer;
class FtplPlayer;

std::unique_ptr<Player> MakeFtrlAdapter(std::unique_ptr<FtrlPlayer> player);
std::unique_ptr<Player> MakeFtplAdapter(std::unique_ptr<FtplPlayer> player);
std::unique_ptr<Player> MakeBanditAdapter(
    std::unique_ptr<PrivatizedBandit> bandit);

struct RoundRecord {
  std::int64_t t = 0;
  Vector point;
  double loss_value = 0.0;
  double cumulative_regret = 0.0;
};

struct GameTrace {
  std::vector<RoundRecord> rounds;
  double cumulative_loss = 0.0;
  double comparator_loss = 0.0;
  double regret = 0.0;
  // Regret after each requested checkpoint round.
  std::vector<double> checkpoint_regret;
};

// min_x sum_t <l_t, x> via the linear oracle on the total loss vector.
double ComparatorLoss(const DecisionSet& set, const Vector& total_loss);

// Plays T rounds. Rounds are recorded only when record_rounds is set.
GameTrace PlayGame(Player& player, Adversary& adversary,
                   const DecisionSet& comparator_set, std::int64_t horizon,
                   SeededRng& player_rng,
                   const std::vector<std::int64_t>& checkpoints,
                   bool record_rounds);

struct CheckpointStats {
  std::int64_t t = 0;
  double mean_regret = 0.0;
  double std_error = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

struct GameRequest {
  PlayerFactory player;
  AdversarySpec adversary;
  std::int64_t horizon = 0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  // Player streams are keyed by this tag; adversary streams are shared across
  // tags so different algorithms face the same loss sequences.
  std::string algorithm_tag = "player";
  // Empty selects PowerOfTwoCheckpoints(horizon).
  std::vector<std::int64_t> checkpoints;
  Execution execution = Execution::kParallel;
};

struct GameStats {
  std::vector<CheckpointStats> checkpoints;
  // trials x checkpoints, row-major.
  std::vector<double> regret;
  std::int64_t trials = 0;

  // Per-trial regret at checkpoint column c.
  std::vector<double> Column(std::size_t c) const;
};

// 2^6, 2^7, ... up to T, plus T itself when it is not a power of two. Short
// horizons start at 2.
std::vector<std::int64_t> PowerOfTwoCheckpoints(std::int64_t horizon,
                                                int first_exponent = 6);

GameStats RunGame(const GameRequest& request);

struct NoisyOcoRequest {
  std::function<std::unique_ptr<BanditLearner>()> learner;
  AdversarySpec adversary;
  NoiseSpec noise = NoiseSpec::Zero(1);
  double sensitivity_bound = 1.0;
  double value_bound = 1.0;
  std::int64_t horizon = 0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  bool adaptive = false;
  // Negative control: a constant added to every noise draw.
  std::optional<Vector> noise_bias;
  Execution execution = Execution::kParallel;
};

struct NoisyOcoReport {
  double mean_true_regret = 0.0;
  double mean_noisy_regret = 0.0;
  double difference = 0.0;
  double stderr_difference = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // |difference| <= 3 stderr.
  bool consistent = false;
};

// Runs the privatized learner and measures regret against the same fixed
// comparator (best point in hindsight on the true losses) with the true and
// with the noisy losses.
NoisyOcoReport NoisyOcoCheck(const NoisyOcoRequest& request);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

// Least-squares slope of log(regret) against log(T). Needs at least three
// checkpoints spanning two octaves; nonpositive regrets are dropped with a
// warning.
SlopeFit RegretSlope(const std::vector<std::pair<double, double>>& points);

}  // namespace dpolo

#endif  // DPOLO_SIM_H_
