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

#include "dpolo/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "dpolo/bandit.h"
#include "dpolo/errors.h"
#include "dpolo/full_info.h"
#include "dpolo/noise.h"
#include "dpolo/tree_agg.h"

namespace dpolo {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    throw ConfigError("key '" + std::string(key) + "' expects a number, got '" +
                      std::string(value) + "'");
  }
  return out;
}

template <typename Int>
Int ParseInt(std::string_view key, std::string_view value) {
  Int out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) +
                      "' expects an integer, got '" + std::string(value) + "'");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + std::string(key) + "' expects true or false");
}

// Shortest text that reads back to the same double.
std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

constexpr std::string_view kOverridePrefix = "override.";

void AddParam(DerivedParams& out, const ExperimentConfig& config,
              const std::string& name, double derived_value) {
  const auto it = config.overrides.find(name);
  if (it != config.overrides.end()) {
    out.params.push_back({name, it->second, "override"});
  } else {
    out.params.push_back({name, derived_value, "derived"});
  }
}

}  // namespace

std::string_view ToString(Setting setting) {
  switch (setting) {
    case Setting::kExperts:
      return "experts";
    case Setting::kSphere:
      return "sphere";
    case Setting::kCube:
      return "cube";
    case Setting::kMab:
      return "mab";
    case Setting::kLinearBandit:
      return "linear_bandit";
  }
  return "unknown";
}

std::string_view ToString(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kFtrl:
      return "ftrl";
    case Algorithm::kFtpl:
      return "ftpl";
    case Algorithm::kDpExp2:
      return "dp_exp2";
    case Algorithm::kDpScribble:
      return "dp_scribble";
    case Algorithm::kNonprivateBaseline:
      return "nonprivate_baseline";
  }
  return "unknown";
}

std::optional<Setting> ParseSetting(std::string_view name) {
  for (Setting s : {Setting::kExperts, Setting::kSphere, Setting::kCube,
                    Setting::kMab, Setting::kLinearBandit}) {
    if (ToString(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kFtrl, Algorithm::kFtpl, Algorithm::kDpExp2,
                      Algorithm::kDpScribble,
                      Algorithm::kNonprivateBaseline}) {
    if (ToString(a) == name) return a;
  }
  return std::nullopt;
}

LossModel ModelFor(Setting setting) {
  switch (setting) {
    case Setting::kExperts:
    case Setting::kMab:
      return LossModel::kExperts;
    case Setting::kSphere:
    case Setting::kLinearBandit:
      return LossModel::kSphere;
    case Setting::kCube:
      return LossModel::kCube;
  }
  return LossModel::kExperts;
}

const std::vector<std::pair<Setting, Algorithm>>& SupportedMatrix() {
  static const auto* const kMatrix =
      new std::vector<std::pair<Setting, Algorithm>>{
          {Setting::kExperts, Algorithm::kFtrl},
          {Setting::kExperts, Algorithm::kFtpl},
          {Setting::kExperts, Algorithm::kNonprivateBaseline},
          {Setting::kSphere, Algorithm::kFtrl},
          {Setting::kSphere, Algorithm::kFtpl},
          {Setting::kSphere, Algorithm::kNonprivateBaseline},
          {Setting::kCube, Algorithm::kFtrl},
          {Setting::kCube, Algorithm::kFtpl},
          {Setting::kCube, Algorithm::kNonprivateBaseline},
          {Setting::kMab, Algorithm::kDpExp2},
          {Setting::kMab, Algorithm::kNonprivateBaseline},
          {Setting::kLinearBandit, Algorithm::kDpScribble},
          {Setting::kLinearBandit, Algorithm::kNonprivateBaseline},
      };
  return *kMatrix;
}

bool IsSupported(Setting setting, Algorithm algorithm) {
  const auto& m = SupportedMatrix();
  return std::find(m.begin(), m.end(), std::make_pair(setting, algorithm)) !=
         m.end();
}

std::string SupportedMatrixText() {
  std::string out;
  for (Setting s : {Setting::kExperts, Setting::kSphere, Setting::kCube,
                    Setting::kMab, Setting::kLinearBandit}) {
    out += std::string(ToString(s)) + ":";
    for (const auto& [ms, ma] : SupportedMatrix()) {
      if (ms == s) out += " " + std::string(ToString(ma));
    }
    out += "\n";
  }
  return out;
}

KeyValues ParseKeyValues(std::string_view text) {
  KeyValues out;
  int line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = Trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::string(key), std::string(Trim(line.substr(eq + 1))));
  }
  return out;
}

KeyValues ReadKeyValuesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseKeyValues(buffer.str());
}

const std::vector<std::string>& OverridableParams() {
  static const auto* const kNames =
      new std::vector<std::string>{"lambda", "sigma", "eta", "gamma"};
  return *kNames;
}

const std::vector<std::string>& ExperimentKeys() {
  static const auto* const kKeys = new std::vector<std::string>{
      "setting",           "algorithm",        "N",
      "T",                 "epsilon",          "delta",
      "trials",            "seed",             "out",
      "adversary",         "adversary.best_arm", "adversary.gap",
      "adversary.drift",   "adversary.period", "adversary.sequence",
      "checkpoint.first_exponent", "override.lambda", "override.sigma",
      "override.eta",      "override.gamma"};
  return *kKeys;
}

ExperimentConfig BuildExperimentConfig(const KeyValues& values) {
  ExperimentConfig c;
  std::string sequence_text;
  for (const auto& [key, value] : values) {
    if (key == "setting") {
      const auto s = ParseSetting(value);
      if (!s) {
        throw ConfigError("unknown setting '" + value + "'; supported:\n" +
                          SupportedMatrixText());
      }
      c.setting = *s;
    } else if (key == "algorithm") {
      const auto a = ParseAlgorithm(value);
      if (!a) {
        throw ConfigError("unknown algorithm '" + value + "'; supported:\n" +
                          SupportedMatrixText());
      }
      c.algorithm = *a;
    } else if (key == "N") {
      c.n = ParseInt<int>(key, value);
    } else if (key == "T") {
      c.horizon = ParseInt<std::int64_t>(key, value);
    } else if (key == "epsilon") {
      c.epsilon = ParseDouble(key, value);
    } else if (key == "delta") {
      c.delta = ParseDouble(key, value);
    } else if (key == "trials") {
      c.trials = ParseInt<std::int64_t>(key, value);
    } else if (key == "seed") {
      c.seed = ParseInt<std::uint64_t>(key, value);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "adversary") {
      const auto kind = ParseAdversaryKind(value);
      if (!kind) {
        throw ConfigError("unknown adversary '" + value +
                          "'; valid: fixed_sequence, stochastic_best_arm, "
                          "sinusoidal_drift, worst_case_experts");
      }
      c.adversary.kind = *kind;
    } else if (key == "adversary.best_arm") {
      c.adversary.best_arm = ParseInt<int>(key, value);
    } else if (key == "adversary.gap") {
      c.adversary.gap = ParseDouble(key, value);
    } else if (key == "adversary.drift") {
      c.adversary.drift = ParseDouble(key, value);
    } else if (key == "adversary.period") {
      c.adversary.period = ParseDouble(key, value);
    } else if (key == "adversary.sequence") {
      sequence_text = value;
    } else if (key == "checkpoint.first_exponent") {
      c.first_checkpoint_exponent = ParseInt<int>(key, value);
    } else if (key.starts_with(kOverridePrefix) &&
               std::find(OverridableParams().begin(),
                         OverridableParams().end(),
                         key.substr(kOverridePrefix.size())) !=
                   OverridableParams().end()) {
      c.overrides[key.substr(kOverridePrefix.size())] = ParseDouble(key, value);
    } else {
      throw ConfigError("unknown key '" + key +
                        "'; valid keys: " + Join(ExperimentKeys()));
    }
  }
  if (!IsSupported(c.setting, c.algorithm)) {
    throw ConfigError("algorithm " + std::string(ToString(c.algorithm)) +
                      " does not run in setting " +
                      std::string(ToString(c.setting)) + "; supported:\n" +
                      SupportedMatrixText());
  }
  if (c.n < 1) throw ConfigError("N must be >= 1");
  if (c.horizon < 2) throw ConfigError("T must be >= 2");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (c.delta && !(*c.delta >= 0.0 && *c.delta < 1.0)) {
    throw ConfigError("delta must lie in [0, 1)");
  }
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.first_checkpoint_exponent < 0 || c.first_checkpoint_exponent > 62) {
    throw ConfigError("checkpoint.first_exponent out of range");
  }
  for (const auto& [name, v] : c.overrides) {
    if (!(v >= 0.0)) throw ConfigError("override." + name + " must be >= 0");
  }
  c.adversary.model = ModelFor(c.setting);
  c.adversary.dim = c.n;
  if (!sequence_text.empty()) {
    for (std::string_view row : Split(sequence_text, ';')) {
      const auto entries = Split(row, ',');
      if (static_cast<int>(entries.size()) != c.n) {
        throw ConfigError("adversary.sequence rows need N entries");
      }
      Vector l(c.n);
      for (int i = 0; i < c.n; ++i) {
        l[i] = ParseDouble("adversary.sequence", entries[i]);
      }
      c.adversary.sequence.push_back(l);
    }
  }
  // Surfaces bad adversary parameters before any trial runs.
  Adversary probe(c.adversary, 0);
  return c;
}

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  return BuildExperimentConfig(ParseKeyValues(text));
}

KeyValues EchoConfig(const ExperimentConfig& c) {
  KeyValues out = {
      {"setting", std::string(ToString(c.setting))},
      {"algorithm", std::string(ToString(c.algorithm))},
      {"N", std::to_string(c.n)},
      {"T", std::to_string(c.horizon)},
      {"epsilon", FormatDouble(c.epsilon)},
  };
  if (c.delta) out.emplace_back("delta", FormatDouble(*c.delta));
  out.emplace_back("trials", std::to_string(c.trials));
  out.emplace_back("seed", std::to_string(c.seed));
  out.emplace_back("out", c.out);
  out.emplace_back("adversary", std::string(ToString(c.adversary.kind)));
  out.emplace_back("adversary.best_arm", std::to_string(c.adversary.best_arm));
  out.emplace_back("adversary.gap", FormatDouble(c.adversary.gap));
  out.emplace_back("adversary.drift", FormatDouble(c.adversary.drift));
  out.emplace_back("adversary.period", FormatDouble(c.adversary.period));
  if (!c.adversary.sequence.empty()) {
    std::string seq;
    for (const Vector& l : c.adversary.sequence) {
      if (!seq.empty()) seq += ";";
      for (int i = 0; i < l.size(); ++i) {
        if (i > 0) seq += ",";
        seq += FormatDouble(l[i]);
      }
    }
    out.emplace_back("adversary.sequence", seq);
  }
  out.emplace_back("checkpoint.first_exponent",
                   std::to_string(c.first_checkpoint_exponent));
  for (const auto& [name, v] : c.overrides) {
    out.emplace_back(std::string(kOverridePrefix) + name, FormatDouble(v));
  }
  return out;
}

std::optional<double> DerivedParams::Find(std::string_view name) const {
  for (const DerivedParam& p : params) {
    if (p.name == name) return p.value;
  }
  return std::nullopt;
}

double DerivedParams::Get(std::string_view name) const {
  const auto v = Find(name);
  if (!v) throw ContractError("no derived parameter " + std::string(name));
  return *v;
}

DerivedParams ResolveDerivedParams(const ExperimentConfig& c) {
  const LossModel model = ModelFor(c.setting);
  const DecisionSet set(NaturalSet(model), c.n);
  const SetBounds bounds = ComputeSetBounds(set, model);
  const PrivacyParams privacy{c.epsilon, c.delta.value_or(0.0)};
  DerivedParams out;
  std::vector<std::string> used;

  switch (c.setting) {
    case Setting::kExperts:
    case Setting::kSphere:
    case Setting::kCube: {
      const Regularizer reg = model == LossModel::kExperts
                                  ? Regularizer::NegativeEntropy()
                                  : Regularizer::SquaredL2();
      if (c.algorithm == Algorithm::kFtrl) {
        AddParam(out, c, "lambda",
                 LaplaceLambdaFor(privacy, bounds.y_norm_1, c.horizon));
        used.push_back("lambda");
      } else if (c.algorithm == Algorithm::kFtpl) {
        if (!c.delta || !(*c.delta > 0.0)) {
          throw ConfigError(
              "algorithm ftpl adds Gaussian noise and needs delta > 0");
        }
        AddParam(out, c, "sigma",
                 GaussianSigmaFor(privacy, bounds.y_norm_2, c.n, c.horizon));
        used.push_back("sigma");
      }
      if (c.algorithm != Algorithm::kFtpl) {
        AddParam(out, c, "eta",
                 FtrlEtaFor(model, bounds, reg.Range(set), c.horizon));
        used.push_back("eta");
      }
      break;
    }
    case Setting::kMab: {
      const bool priv = c.algorithm == Algorithm::kDpExp2;
      // Feedback <l, e_i> = l_i moves by at most 1 between neighbors.
      AddParam(out, c, "lambda", priv ? ReductionLambdaFor(1.0, c.epsilon) : 0.0);
      const double lambda = out.Get("lambda");
      const Exp2Params p = Exp2Params::ForPrivateMab(c.n, c.horizon, lambda);
      AddParam(out, c, "eta", p.eta);
      AddParam(out, c, "gamma", p.gamma);
      Exp2Params resolved = p;
      resolved.eta = out.Get("eta");
      resolved.gamma = out.Get("gamma");
      out.params.push_back(
          {"exp2_condition_ratio",
           Exp2ConditionRatio(resolved, lambda, c.n, c.horizon), "derived"});
      used = {"lambda", "eta", "gamma"};
      break;
    }
    case Setting::kLinearBandit: {
      const bool priv = c.algorithm == Algorithm::kDpScribble;
      AddParam(out, c, "lambda",
               priv ? ReductionLambdaFor(bounds.y_norm_1, c.epsilon) : 0.0);
      AddParam(out, c, "eta",
               ScribbleParams::ForPrivateBall(c.n, c.horizon, bounds.m_bound,
                                              out.Get("lambda"),
                                              bounds.x_norm_2)
                   .eta);
      used = {"lambda", "eta"};
      break;
    }
  }
  for (const auto& [name, v] : c.overrides) {
    if (std::find(used.begin(), used.end(), name) == used.end()) {
      throw ConfigError("override." + name + " does not apply to " +
                        std::string(ToString(c.setting)) + "/" +
                        std::string(ToString(c.algorithm)));
    }
  }
  return out;
}

nlohmann::json ToJson(const DerivedParams& derived) {
  nlohmann::json j = nlohmann::json::object();
  for (const DerivedParam& p : derived.params) {
    j[p.name] = {{"value", p.value}, {"provenance", p.provenance}};
  }
  return j;
}

PlayerFactory MakePlayerFactory(const ExperimentConfig& c,
                                const DerivedParams& derived) {
  const LossModel model = ModelFor(c.setting);
  const DecisionSet set(NaturalSet(model), c.n);
  const SetBounds bounds = ComputeSetBounds(set, model);
  const LossBound bound = LossBound::ForModel(model);
  const std::int64_t horizon = c.horizon;
  const int n = c.n;

  switch (c.setting) {
    case Setting::kExperts:
    case Setting::kSphere:
    case Setting::kCube: {
      const Regularizer reg = model == LossModel::kExperts
                                  ? Regularizer::NegativeEntropy()
                                  : Regularizer::SquaredL2();
      if (c.algorithm == Algorithm::kFtpl) {
        const NoiseSpec noise = NoiseSpec::Gaussian(derived.Get("sigma"), n);
        return [=](SeededRng& rng) {
          return MakeFtplAdapter(
              std::make_unique<FtplPlayer>(set, horizon, noise, bound, rng));
        };
      }
      const NoiseSpec noise = c.algorithm == Algorithm::kFtrl
                                  ? NoiseSpec::Laplace(derived.Get("lambda"), n)
                                  : NoiseSpec::Zero(n);
      const double eta = derived.Get("eta");
      return [=](SeededRng& rng) {
        return MakeFtrlAdapter(std::make_unique<FtrlPlayer>(
            set, reg, eta, horizon, noise, bound, rng));
      };
    }
    case Setting::kMab: {
      const double lambda = derived.Get("lambda");
      Exp2Params p;
      p.eta = derived.Get("eta");
      p.gamma = derived.Get("gamma");
      const NoiseSpec noise =
          lambda > 0.0 ? NoiseSpec::Laplace(lambda, n) : NoiseSpec::Zero(n);
      return [=](SeededRng& /*rng*/) {
        return MakeBanditAdapter(std::make_unique<PrivatizedBandit>(
            std::make_unique<Exp2>(n, p), noise, 1.0, bounds.m_bound));
      };
    }
    case Setting::kLinearBandit: {
      const double lambda = derived.Get("lambda");
      ScribbleParams p;
      p.eta = derived.Get("eta");
      const NoiseSpec noise =
          lambda > 0.0 ? NoiseSpec::Laplace(lambda, n) : NoiseSpec::Zero(n);
      return [=](SeededRng& /*rng*/) {
        return MakeBanditAdapter(std::make_unique<PrivatizedBandit>(
            std::make_unique<Scribble>(n, p), noise, bounds.y_norm_1,
            bounds.m_bound));
      };
    }
  }
  throw UnsupportedError("no player for this configuration");
}

const std::vector<std::string>& AuditChecks() {
  static const auto* const kChecks = new std::vector<std::string>{
      "noise_distribution", "laplace_tail", "empirical_epsilon"};
  return *kChecks;
}

const std::vector<std::string>& AuditKeys() {
  static const auto* const kKeys = new std::vector<std::string>{
      "checks",          "negative_control", "seed",
      "out",             "noise.horizons",   "noise.lambda",
      "noise.samples",   "tail.lambda",      "tail.N",
      "tail.T",          "tail.samples",     "epsilon.values",
      "epsilon.samples", "epsilon.slack"};
  return *kKeys;
}

AuditConfig BuildAuditConfig(const KeyValues& values) {
  AuditConfig c;
  c.checks = AuditChecks();
  for (const auto& [key, value] : values) {
    if (key == "checks") {
      c.checks.clear();
      for (std::string_view name : Split(value, ',')) {
        if (std::find(AuditChecks().begin(), AuditChecks().end(), name) ==
            AuditChecks().end()) {
          throw ConfigError("unknown check '" + std::string(name) +
                            "'; available checks: " + Join(AuditChecks()));
        }
        c.checks.emplace_back(name);
      }
    } else if (key == "negative_control") {
      c.negative_control = ParseBool(key, value);
    } else if (key == "seed") {
      c.seed = ParseInt<std::uint64_t>(key, value);
    } else if (key == "out") {
      c.out = value;
    } else if (key == "noise.horizons") {
      c.noise_horizons.clear();
      for (std::string_view t : Split(value, ',')) {
        c.noise_horizons.push_back(ParseInt<std::int64_t>(key, t));
      }
    } else if (key == "noise.lambda") {
      c.noise_lambda = ParseDouble(key, value);
    } else if (key == "noise.samples") {
      c.noise_samples = ParseInt<std::int64_t>(key, value);
    } else if (key == "tail.lambda") {
      c.tail_lambda = ParseDouble(key, value);
    } else if (key == "tail.N") {
      c.tail_dim = ParseInt<int>(key, value);
    } else if (key == "tail.T") {
      c.tail_horizon = ParseInt<std::int64_t>(key, value);
    } else if (key == "tail.samples") {
      c.tail_samples = ParseInt<std::int64_t>(key, value);
    } else if (key == "epsilon.values") {
      c.epsilons.clear();
      for (std::string_view e : Split(value, ',')) {
        c.epsilons.push_back(ParseDouble(key, e));
      }
    } else if (key == "epsilon.samples") {
      c.epsilon_samples = ParseInt<std::int64_t>(key, value);
    } else if (key == "epsilon.slack") {
      c.epsilon_slack = ParseDouble(key, value);
    } else {
      throw ConfigError("unknown key '" + key +
                        "'; valid keys: " + Join(AuditKeys()));
    }
  }
  if (c.checks.empty()) {
    throw ConfigError("no checks selected; available checks: " +
                      Join(AuditChecks()));
  }
  return c;
}

}  // namespace dpolo
