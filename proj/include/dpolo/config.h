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

#ifndef DPOLO_CONFIG_H_
#define DPOLO_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpolo/geometry.h"
#include "dpolo/parallel.h"
#include "dpolo/sim.h"
#include "json.hpp"

namespace dpolo {

enum class Setting { kExperts, kSphere, kCube, kMab, kLinearBandit };
enum class Algorithm { kFtrl, kFtpl, kDpExp2, kDpScribble, kNonprivateBaseline };

std::string_view ToString(Setting setting);
std::string_view ToString(Algorithm algorithm);
std::optional<Setting> ParseSetting(std::string_view name);
std::optional<Algorithm> ParseAlgorithm(std::string_view name);

LossModel ModelFor(Setting setting);

// Supported (setting, algorithm) pairs.
const std::vector<std::pair<Setting, Algorithm>>& SupportedMatrix();
bool IsSupported(Setting setting, Algorithm algorithm);
std::string SupportedMatrixText();

// Ordered key -> value pairs from "key = value" lines. '#' starts a comment.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues ParseKeyValues(std::string_view text);
KeyValues ReadKeyValuesFile(const std::string& path);

// Names that may appear in an override block.
const std::vector<std::string>& OverridableParams();

struct ExperimentConfig {
  Setting setting = Setting::kExperts;
  Algorithm algorithm = Algorithm::kFtrl;
  int n = 10;
  std::int64_t horizon = 4096;
  double epsilon = 1.0;
  std::optional<double> delta;
  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  std::string out = "out";
  AdversarySpec adversary;
  int first_checkpoint_exponent = 6;
  std::map<std::string, double> overrides;
};

const std::vector<std::string>& ExperimentKeys();

// Later pairs win. Throws ConfigError on unknown keys (listing the valid
// ones), malformed values and unsupported (setting, algorithm) pairs.
ExperimentConfig BuildExperimentConfig(const KeyValues& values);
ExperimentConfig ParseExperimentConfig(std::string_view text);

// Canonical key = value echo; parsing it gives back the same config.
KeyValues EchoConfig(const ExperimentConfig& config);

struct DerivedParam {
  std::string name;
  double value = 0.0;
  // "derived" or "override".
  std::string provenance;
};

struct DerivedParams {
  std::vector<DerivedParam> params;

  std::optional<double> Find(std::string_view name) const;
  double Get(std::string_view name) const;
};

// Pure function of the config.
DerivedParams ResolveDerivedParams(const ExperimentConfig& config);

nlohmann::json ToJson(const DerivedParams& derived);

// The player each trial runs, built from the resolved parameters.
PlayerFactory MakePlayerFactory(const ExperimentConfig& config,
                                const DerivedParams& derived);

struct AuditConfig {
  std::vector<std::string> checks;
  bool negative_control = false;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::vector<std::int64_t> noise_horizons = {2, 8, 64};
  double noise_lambda = 1.0;
  std::int64_t noise_samples = 100000;
  double tail_lambda = 1.0;
  int tail_dim = 4;
  std::int64_t tail_horizon = 8;
  std::int64_t tail_samples = 1000000;
  std::vector<double> epsilons = {0.5, 1.0, 2.0};
  std::int64_t epsilon_samples = 1000000;
  double epsilon_slack = 0.2;
};

const std::vector<std::string>& AuditChecks();
const std::vector<std::string>& AuditKeys();

AuditConfig BuildAuditConfig(const KeyValues& values);

}  // namespace dpolo

#endif  // DPOLO_CONFIG_H_
