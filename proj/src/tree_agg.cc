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
#include <string>

#include "dpolo/errors.h"

namespace dpolo {

LossBound LossBound::ForModel(LossModel model) {
  switch (model) {
    case LossModel::kExperts:
      return {Norm::kLinf, 1.0};
    case LossModel::kSphere:
      return {Norm::kL2, 1.0};
    case LossModel::kCube:
      return {Norm::kL1, 1.0};
  }
  return {};
}

double LossBound::Measure(const Vector& loss) const {
  switch (norm) {
    case Norm::kL1:
      return loss.lpNorm<1>();
    case Norm::kL2:
      return loss.norm();
    case Norm::kLinf:
      return loss.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

std::vector<std::pair<int, std::int64_t>> CoverNodes(std::int64_t t) {
  std::vector<std::pair<int, std::int64_t>> cover;
  if (t < 1) return cover;
  const auto ut = static_cast<std::uint64_t>(t);
  std::uint64_t start = 0;
  for (int level = std::bit_width(ut) - 1; level >= 0; --level) {
    if ((ut >> level) & 1U) {
      cover.emplace_back(level, static_cast<std::int64_t>(start >> level));
      start += std::uint64_t{1} << level;
    }
  }
  return cover;
}

int CoverSize(std::int64_t t, std::int64_t horizon) {
  if (t < 1 || t > horizon) {
    throw ContractError("cover_size requires 1 <= t <= T");
  }
  return std::popcount(static_cast<std::uint64_t>(t));
}

int AffectedNodeCount(std::int64_t t0, std::int64_t horizon) {
  if (t0 < 1 || t0 > horizon) {
    throw ContractError("affected node count requires 1 <= t0 <= T");
  }
  int count = 0;
  for (int level = 0; (std::int64_t{1} << level) <= horizon; ++level) {
    const std::int64_t index = (t0 - 1) >> level;
    if (((index + 1) << level) <= horizon) ++count;
  }
  return count;
}

NoiseTree::NoiseTree(std::int64_t horizon, NoiseSpec spec, LossBound bound,
                     SeededRng& rng, TreeOptions options)
    : horizon_(horizon),
      depth_(CeilLog2Horizon(horizon)),
      top_level_(std::bit_width(static_cast<std::uint64_t>(horizon)) - 1),
      spec_(spec),
      bound_(bound),
      options_(options) {
  std::int64_t total = 0;
  for (int level = 0; level <= top_level_; ++level) {
    level_offset_.push_back(total);
    total += horizon_ >> level;
  }
  partial_sum_.setZero(spec_.dim(), total);
  noise_.setZero(spec_.dim(), total);
  populated_.assign(static_cast<std::size_t>(total), false);

  initial_.round = 0;
  initial_.estimate = Vector::Zero(spec_.dim());
  for (int i = 0; i < depth_; ++i) AddSample(spec_, rng, initial_.estimate);
  initial_.cover_size = 0;
  initial_.topup_count = depth_;
}

std::int64_t NoiseTree::NodeSlot(int level, std::int64_t index) const {
  if (level < 0 || level > top_level_ || index < 0 ||
      index >= (horizon_ >> level)) {
    throw ContractError("tree node (" + std::to_string(level) + ", " +
                        std::to_string(index) + ") is out of range");
  }
  return level_offset_[level] + index;
}

bool NoiseTree::IsPopulated(int level, std::int64_t index) const {
  return populated_[NodeSlot(level, index)];
}

Vector NoiseTree::NodeNoise(int level, std::int64_t index) const {
  return noise_.col(NodeSlot(level, index));
}

Vector NoiseTree::NodePartialSum(int level, std::int64_t index) const {
  return partial_sum_.col(NodeSlot(level, index));
}

void NoiseTree::Populate(int level, std::int64_t index, SeededRng& rng) {
  const std::int64_t slot = NodeSlot(level, index);
  if (level > 0) {
    partial_sum_.col(slot) =
        partial_sum_.col(NodeSlot(level - 1, 2 * index)) +
        partial_sum_.col(NodeSlot(level - 1, 2 * index + 1));
  }
  Vector draw = Sample(spec_, rng);
  noise_.col(slot) = draw;
  populated_[slot] = true;
}

PrivateSumEstimate NoiseTree::InsertAndRelease(const Vector& loss,
                                               SeededRng& rng) {
  if (rounds_seen_ >= horizon_) {
    throw ProtocolError("tree horizon of " + std::to_string(horizon_) +
                        " rounds exceeded");
  }
  if (loss.size() != spec_.dim()) {
    throw ContractError("loss vector has dim " + std::to_string(loss.size()) +
                        ", tree expects " + std::to_string(spec_.dim()));
  }
  if (!loss.allFinite()) throw InputError("loss vector has non-finite entries");
  if (!bound_.Admits(loss)) {
    throw PrivacyContractError("loss norm " + std::to_string(bound_.Measure(loss)) +
                               " exceeds the declared bound " +
                               std::to_string(bound_.bound));
  }
  const std::int64_t t = ++rounds_seen_;
  partial_sum_.col(NodeSlot(0, t - 1)) = loss;
  Populate(0, t - 1, rng);
  for (int level = 1; level <= top_level_; ++level) {
    if (t % (std::int64_t{1} << level) != 0) break;
    Populate(level, (t >> level) - 1, rng);
  }

  PrivateSumEstimate out;
  out.round = t;
  out.estimate = CoverValue();
  out.cover_size = CoverSize(t, horizon_);
  out.topup_count = options_.topup_enabled ? depth_ - out.cover_size : 0;
  for (int i = 0; i < out.topup_count; ++i) AddSample(spec_, rng, out.estimate);
  return out;
}

Vector NoiseTree::CoverValue() const {
  Vector value = Vector::Zero(spec_.dim());
  for (const auto& [level, index] : CoverNodes(rounds_seen_)) {
    const std::int64_t slot = NodeSlot(level, index);
    value += partial_sum_.col(slot) + noise_.col(slot);
  }
  return value;
}

nlohmann::json NoiseTree::DebugDump(bool include_private_values) const {
  nlohmann::json nodes = nlohmann::json::array();
  for (int level = 0; level <= top_level_; ++level) {
    for (std::int64_t index = 0; index < (horizon_ >> level); ++index) {
      const std::int64_t slot = level_offset_[level] + index;
      nlohmann::json node = {
          {"level", level},
          {"index", index},
          {"first_round", (index << level) + 1},
          {"last_round", (index + 1) << level},
          {"populated", static_cast<bool>(populated_[slot])},
      };
      if (include_private_values && populated_[slot]) {
        const Eigen::VectorXd sum = partial_sum_.col(slot);
        const Eigen::VectorXd noise = noise_.col(slot);
        node["partial_sum"] = std::vector<double>(sum.begin(), sum.end());
        node["noise"] = std::vector<double>(noise.begin(), noise.end());
      }
      nodes.push_back(std::move(node));
    }
  }
  return {
      {"horizon", horizon_},
      {"depth", depth_},
      {"rounds_seen", rounds_seen_},
      {"noise_kind", std::string(ToString(spec_.kind()))},
      {"topup_enabled", options_.topup_enabled},
      {"nodes", std::move(nodes)},
  };
}

}  // namespace dpolo
