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

#include "dpolo/sim.h"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "dpolo/errors.h"
#include "dpolo/full_info.h"
#include "dpolo/stats.h"
#include "dpolo/tree_agg.h"

namespace dpolo {
namespace {

double RawScale(LossModel model, int dim) {
  switch (model) {
    case LossModel::kExperts:
      return 1.0;
    case LossModel::kSphere:
      return 1.0 / std::sqrt(static_cast<double>(dim));
    case LossModel::kCube:
      return 1.0 / dim;
  }
  return 1.0;
}

class FtrlAdapter final : public Player {
 public:
  explicit FtrlAdapter(std::unique_ptr<FtrlPlayer> player)
      : player_(std::move(player)) {}

  const Vector& Act(SeededRng& rng) override {
    point_ = player_->Step(pending_, rng);
    pending_.reset();
    return point_;
  }
  void Observe(const Vector& loss, SeededRng& /*rng*/) override {
    pending_ = loss;
  }

 private:
  std::unique_ptr<FtrlPlayer> player_;
  std::optional<Vector> pending_;
  Vector point_;
};

class FtplAdapter final : public Player {
 public:
  explicit FtplAdapter(std::unique_ptr<FtplPlayer> player)
      : player_(std::move(player)) {}

  const Vector& Act(SeededRng& rng) override {
    point_ = player_->Step(pending_, rng);
    pending_.reset();
    return point_;
  }
  void Observe(const Vector& loss, SeededRng& /*rng*/) override {
    pending_ = loss;
  }

 private:
  std::unique_ptr<FtplPlayer> player_;
  std::optional<Vector> pending_;
  Vector point_;
};

class BanditAdapter final : public Player {
 public:
  explicit BanditAdapter(std::unique_ptr<PrivatizedBandit> bandit)
      : bandit_(std::move(bandit)) {}

  const Vector& Act(SeededRng& rng) override {
    if (!started_) {
      started_ = true;
      return bandit_->Start(rng);
    }
    if (!pending_) throw ProtocolError("bandit player acted twice in a row");
    const double value = *pending_;
    pending_.reset();
    return bandit_->Step(value, rng);
  }
  void Observe(const Vector& loss, SeededRng& /*rng*/) override {
    pending_ = loss.dot(bandit_->current_point());
  }

 private:
  std::unique_ptr<PrivatizedBandit> bandit_;
  std::optional<double> pending_;
  bool started_ = false;
};

}  // namespace

std::string_view ToString(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kFixedSequence:
      return "fixed_sequence";
    case AdversaryKind::kStochasticBestArm:
      return "stochastic_best_arm";
    case AdversaryKind::kSinusoidalDrift:
      return "sinusoidal_drift";
    case AdversaryKind::kWorstCaseExperts:
      return "worst_case_experts";
  }
  return "unknown";
}

std::optional<AdversaryKind> ParseAdversaryKind(std::string_view name) {
  for (AdversaryKind kind :
       {AdversaryKind::kFixedSequence, AdversaryKind::kStochasticBestArm,
        AdversaryKind::kSinusoidalDrift, AdversaryKind::kWorstCaseExperts}) {
    if (ToString(kind) == name) return kind;
  }
  return std::nullopt;
}

Adversary::Adversary(AdversarySpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed), scale_(RawScale(spec_.model, spec_.dim)) {
  if (spec_.dim < 1) throw ConfigError("adversary dimension must be >= 1");
  if (spec_.kind == AdversaryKind::kFixedSequence) {
    if (spec_.sequence.empty()) {
      throw ConfigError("fixed_sequence adversary needs at least one loss");
    }
    for (const Vector& l : spec_.sequence) {
      if (l.size() != spec_.dim) {
        throw ConfigError("fixed_sequence loss has the wrong dimension");
      }
      if (!LossBound::ForModel(spec_.model).Admits(l)) {
        throw ConfigError("fixed_sequence loss lies outside the loss set");
      }
    }
  }
  if (spec_.best_arm < 0 || spec_.best_arm >= spec_.dim) {
    throw ConfigError("adversary best_arm is out of range");
  }
  if (!(spec_.gap >= 0.0 && spec_.gap <= 0.5)) {
    throw ConfigError("stochastic_best_arm gap must lie in [0, 0.5]");
  }
  if (!(spec_.drift >= 0.0 && spec_.drift <= 1.0)) {
    throw ConfigError("worst_case_experts drift must lie in [0, 1]");
  }
  if (!(spec_.period > 0.0)) throw ConfigError("period must be positive");
}

Vector Adversary::Next() {
  ++t_;
  const int n = spec_.dim;
  Vector raw(n);
  switch (spec_.kind) {
    case AdversaryKind::kFixedSequence: {
      const auto size = static_cast<std::int64_t>(spec_.sequence.size());
      raw = spec_.sequence[(t_ - 1) % size];
      break;
    }
    case AdversaryKind::kStochasticBestArm:
      for (int i = 0; i < n; ++i) {
        const double mean = i == spec_.best_arm ? 0.5 - spec_.gap : 0.5;
        raw[i] = rng_.UniformOpen01() < mean ? 1.0 : 0.0;
      }
      break;
    case AdversaryKind::kSinusoidalDrift:
      for (int i = 0; i < n; ++i) {
        raw[i] = std::sin(2.0 * std::numbers::pi *
                          (static_cast<double>(t_) / spec_.period +
                           static_cast<double>(i) / n));
      }
      break;
    case AdversaryKind::kWorstCaseExperts:
      for (int i = 0; i < n; ++i) {
        const double p_minus = i == spec_.best_arm ? 0.5 * (1.0 + spec_.drift)
                                                   : 0.5;
        raw[i] = rng_.UniformOpen01() < p_minus ? -1.0 : 1.0;
      }
      break;
  }
  if (spec_.kind != AdversaryKind::kFixedSequence) raw *= scale_;
  if (!LossBound::ForModel(spec_.model).Admits(raw)) {
    throw ConfigError("adversary emitted a loss outside the " +
                      std::string(ToString(spec_.model)) + " loss set");
  }
  return raw;
}

std::vector<Vector> GenerateLosses(const AdversarySpec& spec,
                                   std::uint64_t seed, std::int64_t rounds) {
  Adversary adversary(spec, seed);
  std::vector<Vector> losses;
  losses.reserve(static_cast<std::size_t>(rounds));
  for (std::int64_t t = 0; t < rounds; ++t) losses.push_back(adversary.Next());
  return losses;
}

std::unique_ptr<Player> MakeFtrlAdapter(std::unique_ptr<FtrlPlayer> player) {
  return std::make_unique<FtrlAdapter>(std::move(player));
}

std::unique_ptr<Player> MakeFtplAdapter(std::unique_ptr<FtplPlayer> player) {
  return std::make_unique<FtplAdapter>(std::move(player));
}

std::unique_ptr<Player> MakeBanditAdapter(
    std::unique_ptr<PrivatizedBandit> bandit) {
  return std::make_unique<BanditAdapter>(std::move(bandit));
}

double ComparatorLoss(const DecisionSet& set, const Vector& total_loss) {
  return total_loss.dot(LinearArgmin(set, total_loss));
}

GameTrace PlayGame(Player& player, Adversary& adversary,
                   const DecisionSet& comparator_set, std::int64_t horizon,
                   SeededRng& player_rng,
                   const std::vector<std::int64_t>& checkpoints,
                   bool record_rounds) {
  if (comparator_set.dim() != adversary.spec().dim) {
    throw ConfigError("player and adversary dimensions differ");
  }
  GameTrace trace;
  Vector total = Vector::Zero(comparator_set.dim());
  std::size_t next_checkpoint = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const Vector& x = player.Act(player_rng);
    const Vector loss = adversary.Next();
    const double value = loss.dot(x);
    trace.cumulative_loss += value;
    total += loss;
    if (record_rounds) {
      trace.rounds.push_back(
          {t, x, value,
           trace.cumulative_loss - ComparatorLoss(comparator_set, total)});
    }
    // The last loss is never needed by the player.
    if (t < horizon) player.Observe(loss, player_rng);
    while (next_checkpoint < checkpoints.size() &&
           checkpoints[next_checkpoint] == t) {
      trace.checkpoint_regret.push_back(
          trace.cumulative_loss - ComparatorLoss(comparator_set, total));
      ++next_checkpoint;
    }
  }
  trace.comparator_loss = ComparatorLoss(comparator_set, total);
  trace.regret = trace.cumulative_loss - trace.comparator_loss;
  return trace;
}

std::vector<std::int64_t> PowerOfTwoCheckpoints(std::int64_t horizon,
                                                int first_exponent) {
  std::vector<std::int64_t> out;
  if (horizon < 1) return out;
  std::int64_t c = std::int64_t{1} << first_exponent;
  if (c > horizon) c = horizon >= 2 ? 2 : 1;
  for (; c <= horizon; c *= 2) out.push_back(c);
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

std::vector<double> GameStats::Column(std::size_t c) const {
  const std::size_t width = checkpoints.size();
  std::vector<double> col(static_cast<std::size_t>(trials));
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = regret[i * width + c];
  return col;
}

GameStats RunGame(const GameRequest& request) {
  if (!request.player) throw ConfigError("game needs a player factory");
  if (request.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (request.trials < 1) throw ConfigError("trials must be >= 1");
  const std::vector<std::int64_t> checkpoints =
      request.checkpoints.empty() ? PowerOfTwoCheckpoints(request.horizon)
                                  : request.checkpoints;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > request.horizon ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw ConfigError("checkpoints must be increasing rounds within [1, T]");
    }
  }
  const DecisionSet comparator_set(NaturalSet(request.adversary.model),
                                   request.adversary.dim);
  const std::size_t width = checkpoints.size();

  GameStats stats_out;
  stats_out.trials = request.trials;
  stats_out.regret.assign(static_cast<std::size_t>(request.trials) * width, 0.0);
  ForEachTrial(request.trials, request.execution, [&](std::int64_t trial) {
    SeededRng player_rng(DeriveSeed(request.seed, trial, request.algorithm_tag));
    Adversary adversary(request.adversary,
                        DeriveSeed(request.seed, trial, "adversary"));
    std::unique_ptr<Player> player = request.player(player_rng);
    const GameTrace trace =
        PlayGame(*player, adversary, comparator_set, request.horizon,
                 player_rng, checkpoints, /*record_rounds=*/false);
    std::copy(trace.checkpoint_regret.begin(), trace.checkpoint_regret.end(),
              stats_out.regret.begin() + trial * width);
  });

  stats_out.checkpoints.resize(width);
  for (std::size_t c = 0; c < width; ++c) {
    const std::vector<double> col = stats_out.Column(c);
    stats_out.checkpoints[c] = CheckpointStats{checkpoints[c], stats::Mean(col),
                                     stats::StdError(col),
                                     stats::Quantile(col, 0.1),
                                     stats::Quantile(col, 0.9)};
  }
  return stats_out;
}

NoisyOcoReport NoisyOcoCheck(const NoisyOcoRequest& request) {
  if (request.adaptive) {
    throw ContractError(
        "the noisy-regret identity needs an oblivious adversary");
  }
  if (!request.learner) throw ConfigError("check needs a learner factory");
  if (request.horizon < 1 || request.trials < 2) {
    throw ConfigError("check needs horizon >= 1 and trials >= 2");
  }
  const DecisionSet set(NaturalSet(request.adversary.model),
                        request.adversary.dim);
  std::vector<double> true_regret(request.trials);
  std::vector<double> gap(request.trials);
  ForEachTrial(request.trials, request.execution, [&](std::int64_t trial) {
    const std::vector<Vector> losses =
        GenerateLosses(request.adversary,
                       DeriveSeed(request.seed, trial, "adversary"),
                       request.horizon);
    Vector total = Vector::Zero(set.dim());
    for (const Vector& l : losses) total += l;
    const Vector comparator = LinearArgmin(set, total);

    SeededRng rng(DeriveSeed(request.seed, trial, "noisy_oco"));
    PrivatizedBandit bandit(request.learner(), request.noise,
                            request.sensitivity_bound, request.value_bound);
    if (request.noise_bias) bandit.set_noise_bias_for_testing(*request.noise_bias);
    Vector x = bandit.Start(rng);
    double regret = 0.0;
    double noise_gap = 0.0;
    for (std::int64_t t = 0; t < request.horizon; ++t) {
      const Vector& l = losses[t];
      const double value = l.dot(x);
      regret += value - l.dot(comparator);
      if (t + 1 < request.horizon) {
        const Vector played = x;
        x = bandit.Step(value, rng);
        noise_gap += bandit.last_noise().dot(played - comparator);
      } else {
        bandit.Finish(value, rng);
        noise_gap += bandit.last_noise().dot(x - comparator);
      }
    }
    true_regret[trial] = regret;
    gap[trial] = noise_gap;
  });

  NoisyOcoReport report;
  report.mean_true_regret = stats::Mean(true_regret);
  report.difference = stats::Mean(gap);
  report.mean_noisy_regret = report.mean_true_regret + report.difference;
  report.stderr_difference = stats::StdError(gap);
  report.ci_low = report.difference - 3.0 * report.stderr_difference;
  report.ci_high = report.difference + 3.0 * report.stderr_difference;
  report.consistent =
      std::abs(report.difference) <= 3.0 * report.stderr_difference;
  return report;
}

SlopeFit RegretSlope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw ContractError("regret slope needs at least three checkpoints");
  }
  double t_min = points.front().first;
  double t_max = points.front().first;
  for (const auto& [t, r] : points) {
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  if (!(t_min > 0.0) || t_max < 4.0 * t_min) {
    throw ContractError("regret slope checkpoints must span two octaves");
  }
  SlopeFit fit;
  std::vector<double> log_t;
  std::vector<double> log_r;
  for (const auto& [t, r] : points) {
    if (!(r > 0.0)) {
      fit.warnings.push_back("excluded nonpositive regret " +
                             std::to_string(r) + " at T=" + std::to_string(t));
      continue;
    }
    log_t.push_back(std::log(t));
    log_r.push_back(std::log(r));
  }
  if (log_t.size() < 2) {
    throw ContractError("fewer than two positive regret values to fit");
  }
  const stats::LinearFit lf = stats::LeastSquares(log_t, log_r);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.points_used = log_t.size();
  return fit;
}

}  // namespace dpolo
