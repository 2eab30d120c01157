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

#include "dpolo/full_info.h"

#include <cmath>
#include <string>

#include "dpolo/errors.h"
#include "dpolo/stats.h"

namespace dpolo {

PrivateLeaderStream::PrivateLeaderStream(int dim, std::int64_t horizon,
                                         NoiseSpec noise, LossBound bound,
                                         SeededRng& rng, TreeOptions options)
    : tree_(horizon, noise, bound, rng, options), last_(tree_.initial_estimate()) {
  if (noise.dim() != dim) {
    throw ContractError("noise dimension does not match the decision set");
  }
}

const Vector& PrivateLeaderStream::Advance(
    const std::optional<Vector>& observed_loss, SeededRng& rng) {
  if (round_ >= tree_.horizon()) {
    throw ProtocolError("player horizon of " + std::to_string(tree_.horizon()) +
                        " rounds exceeded");
  }
  if (round_ == 0) {
    if (observed_loss) {
      throw ProtocolError("round 1 has no previous loss to observe");
    }
  } else {
    if (!observed_loss) {
      throw ProtocolError("round " + std::to_string(round_ + 1) +
                          " needs the loss of round " + std::to_string(round_));
    }
    last_ = tree_.InsertAndRelease(*observed_loss, rng);
  }
  ++round_;
  return last_.estimate;
}

FtrlPlayer::FtrlPlayer(DecisionSet set, Regularizer reg, double eta,
                       std::int64_t horizon, NoiseSpec noise, LossBound bound,
                       SeededRng& rng, TreeOptions options)
    : set_(set),
      reg_(reg),
      eta_(eta),
      stream_(set.dim(), horizon, noise, bound, rng, options) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ContractError("eta must be a positive finite real");
  }
  // Rejects unsupported (set, regularizer) pairs up front.
  RegularizedArgmin(set_, reg_, Vector::Zero(set_.dim()), eta_);
}

Vector FtrlPlayer::Step(const std::optional<Vector>& observed_loss,
                        SeededRng& rng) {
  const Vector& estimate = stream_.Advance(observed_loss, rng);
  return RegularizedArgmin(set_, reg_, estimate, eta_);
}

FtplPlayer::FtplPlayer(DecisionSet set, std::int64_t horizon, NoiseSpec noise,
                       LossBound bound, SeededRng& rng, FtplOptions options)
    : set_(set), stream_(set.dim(), horizon, noise, bound, rng, options.tree) {
  if (noise.kind() == NoiseKind::kLaplace && !options.experimental_laplace) {
    throw UnsupportedError(
        "FTPL uses gaussian perturbations; laplace requires the experimental "
        "flag");
  }
}

Vector FtplPlayer::Step(const std::optional<Vector>& observed_loss,
                        SeededRng& rng) {
  return LinearArgmin(set_, stream_.Advance(observed_loss, rng));
}

double FtrlEtaFor(LossModel model, const SetBounds& bounds, double d_r,
                  std::int64_t horizon) {
  if (horizon < 1) throw ContractError("horizon must be >= 1");
  if (d_r <= 0.0) return 1.0;
  const double t = static_cast<double>(horizon);
  if (model == LossModel::kExperts) return std::sqrt(d_r / t);
  const double g = bounds.y_norm_2;
  return std::sqrt(d_r / (t * g * g));
}

OneShotReport OneShotEquivalenceCheck(const OneShotRequest& request) {
  if (request.adaptive) {
    throw ContractError(
        "one-shot equivalence holds only against an oblivious adversary");
  }
  if (request.losses.empty()) throw ContractError("empty loss sequence");
  if (request.trials < 2) throw ContractError("need at least two trials");
  const auto horizon = static_cast<std::int64_t>(request.losses.size());
  const int dim = static_cast<int>(request.losses.front().size());
  const DecisionSet set = DecisionSet::Simplex(dim);
  const Regularizer reg = Regularizer::NegativeEntropy();
  const double eta =
      request.eta > 0.0
          ? request.eta
          : FtrlEtaFor(LossModel::kExperts,
                       ComputeSetBounds(set, LossModel::kExperts),
                       reg.Range(set), horizon);
  const NoiseSpec noise = request.zero_noise
                              ? NoiseSpec::Zero(dim)
                              : NoiseSpec::Laplace(request.lambda, dim);
  const LossBound bound = LossBound::ForModel(LossModel::kExperts);
  const int depth = CeilLog2Horizon(horizon);

  std::vector<double> tree_loss(request.trials);
  std::vector<double> one_shot_loss(request.trials);
  ForEachTrial(request.trials, request.execution, [&](std::int64_t trial) {
    SeededRng tree_rng(DeriveSeed(request.seed, trial, "one_shot/tree"));
    FtrlPlayer player(set, reg, eta, horizon, noise, bound, tree_rng);
    double total = 0.0;
    std::optional<Vector> prev;
    for (const Vector& loss : request.losses) {
      const Vector x = player.Step(prev, tree_rng);
      total += loss.dot(x);
      prev = loss;
    }
    tree_loss[trial] = total;

    SeededRng shot_rng(DeriveSeed(request.seed, trial, "one_shot/single"));
    Vector cumulative = Vector::Zero(dim);
    for (int i = 0; i < depth; ++i) AddSample(noise, shot_rng, cumulative);
    total = 0.0;
    for (const Vector& loss : request.losses) {
      total += loss.dot(RegularizedArgmin(set, reg, cumulative, eta));
      cumulative += loss;
    }
    one_shot_loss[trial] = total;
  });

  OneShotReport report;
  report.mean_tree = stats::Mean(tree_loss);
  report.mean_one_shot = stats::Mean(one_shot_loss);
  report.stderr_tree = stats::StdError(tree_loss);
  report.stderr_one_shot = stats::StdError(one_shot_loss);
  report.difference = report.mean_tree - report.mean_one_shot;
  report.pooled_stderr = std::hypot(report.stderr_tree, report.stderr_one_shot);
  report.within_three_se =
      std::abs(report.difference) <= 3.0 * report.pooled_stderr;
  return report;
}

}  // namespace dpolo
