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

#include "dpolo/runner.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "dpolo/audit.h"
#include "dpolo/errors.h"

namespace dpolo {
namespace {

std::string FormatNumber(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

constexpr std::string_view kCsvHeader = "T_checkpoint,mean_regret,stderr,p10,p90";

std::string JoinPath(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

nlohmann::json EchoJson(const ExperimentConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : EchoConfig(config)) j[k] = v;
  return j;
}

nlohmann::json CheckRecord(const std::string& name, bool passed,
                           nlohmann::json details) {
  return {{"check", name},
          {"status", passed ? "pass" : "fail"},
          {"details", std::move(details)}};
}

nlohmann::json NoiseDistributionCheck(const AuditConfig& c, Execution exec,
                                      bool* passed) {
  nlohmann::json runs = nlohmann::json::array();
  *passed = true;
  for (std::int64_t horizon : c.noise_horizons) {
    NoiseDistributionRequest r;
    r.horizon = horizon;
    r.spec = NoiseSpec::Laplace(c.noise_lambda, 1);
    r.samples = c.noise_samples;
    r.seed = DeriveSeed(c.seed, static_cast<std::uint64_t>(horizon),
                        "audit/noise_distribution");
    r.tree.topup_enabled = !c.negative_control;
    r.execution = exec;
    const NoiseDistributionReport report = NoiseDistributionTest(r);
    *passed = *passed && report.passed;
    runs.push_back(ToJson(report));
  }
  return {{"topup_enabled", !c.negative_control}, {"runs", runs}};
}

nlohmann::json TailCheck(const AuditConfig& c, Execution exec, bool* passed) {
  LaplaceTailRequest r;
  r.lambda = c.tail_lambda;
  r.dim = c.tail_dim;
  r.horizon = c.tail_horizon;
  r.samples = c.tail_samples;
  r.seed = DeriveSeed(c.seed, 0, "audit/laplace_tail");
  // The negative control shrinks the threshold so the event is common.
  r.threshold_constant = c.negative_control ? 0.1 : 10.0;
  r.execution = exec;
  const LaplaceTailReport report = LaplaceTailCheck(r);
  *passed = report.passed;
  nlohmann::json j = ToJson(report);
  j["threshold_constant"] = r.threshold_constant;
  return j;
}

nlohmann::json EpsilonCheck(const AuditConfig& c, Execution exec,
                            bool* passed) {
  nlohmann::json runs = nlohmann::json::array();
  *passed = true;
  std::vector<double> hats;
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    const double eps = c.epsilons[i];
    EpsilonRequest r = ToyEpsilonRequest(
        eps, c.epsilon_samples, DeriveSeed(c.seed, i, "audit/empirical_epsilon"));
    if (c.negative_control) r.spec = NoiseSpec::Zero(1);
    r.execution = exec;
    const EpsilonEstimate est = EmpiricalEpsilon(r);
    const bool within = est.epsilon_hat <= eps + c.epsilon_slack;
    *passed = *passed && within;
    hats.push_back(est.epsilon_hat);
    nlohmann::json j = ToJson(est);
    j["configured_epsilon"] = eps;
    j["within_slack"] = within;
    runs.push_back(j);
  }
  // Ordering allows 10% Monte Carlo inversion.
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < hats.size(); ++i) {
    if (c.epsilons[i + 1] > c.epsilons[i] && !(hats[i + 1] >= 0.9 * hats[i])) {
      monotone = false;
    }
  }
  *passed = *passed && monotone;
  return {{"runs", runs}, {"monotone", monotone},
          {"slack", c.epsilon_slack}};
}

}  // namespace

std::string FormatRegretCsv(const std::vector<CheckpointStats>& rows) {
  std::string out(kCsvHeader);
  out += "\n";
  for (const CheckpointStats& r : rows) {
    out += std::to_string(r.t) + "," + FormatNumber(r.mean_regret) + "," +
           FormatNumber(r.std_error) + "," + FormatNumber(r.p10) + "," +
           FormatNumber(r.p90) + "\n";
  }
  return out;
}

std::vector<CheckpointStats> ParseRegretCsv(const std::string& text) {
  std::vector<CheckpointStats> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (header) {
      if (line != kCsvHeader) throw InputError("unexpected CSV header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    double fields[5];
    std::size_t start = 0;
    for (int f = 0; f < 5; ++f) {
      std::size_t comma = line.find(',', start);
      if ((f < 4) == (comma == std::string_view::npos)) {
        throw InputError("CSV row needs five fields");
      }
      if (comma == std::string_view::npos) comma = line.size();
      const auto [ptr, ec] = std::from_chars(line.data() + start,
                                             line.data() + comma, fields[f]);
      if (ec != std::errc() || ptr != line.data() + comma) {
        throw InputError("malformed CSV number");
      }
      start = comma + 1;
    }
    rows.push_back({static_cast<std::int64_t>(fields[0]), fields[1], fields[2],
                    fields[3], fields[4]});
  }
  if (header) throw InputError("empty CSV");
  return rows;
}

void WriteFileAtomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << text;
    if (!out) throw ConfigError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               Execution execution) {
  if (config.trials < 1) throw ConfigError("trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.derived = ResolveDerivedParams(config);

  GameRequest request;
  request.player = MakePlayerFactory(config, result.derived);
  request.adversary = config.adversary;
  request.horizon = config.horizon;
  request.trials = config.trials;
  request.seed = config.seed;
  request.algorithm_tag = std::string(ToString(config.algorithm));
  request.checkpoints =
      PowerOfTwoCheckpoints(config.horizon, config.first_checkpoint_exponent);
  request.execution = execution;
  result.stats = RunGame(request);

  nlohmann::json slope = nullptr;
  nlohmann::json warnings = nlohmann::json::array();
  std::vector<std::pair<double, double>> points;
  for (const CheckpointStats& c : result.stats.checkpoints) {
    points.emplace_back(static_cast<double>(c.t), c.mean_regret);
  }
  try {
    const SlopeFit fit = RegretSlope(points);
    slope = fit.slope;
    for (const std::string& w : fit.warnings) warnings.push_back(w);
  } catch (const ContractError& e) {
    warnings.push_back(e.what());
  }
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  result.summary = {{"config", EchoJson(config)},
                    {"derived", ToJson(result.derived)},
                    {"slope", slope},
                    {"slope_warnings", warnings},
                    {"final_mean_regret",
                     result.stats.checkpoints.back().mean_regret},
                    {"checkpoints", result.stats.checkpoints.size()},
                    {"wall_time_seconds", wall}};

  std::filesystem::create_directories(config.out);
  result.csv_path = JoinPath(config.out, kRegretCsvName);
  result.summary_path = JoinPath(config.out, kSummaryJsonName);
  WriteFileAtomically(result.csv_path,
                      FormatRegretCsv(result.stats.checkpoints));
  WriteFileAtomically(result.summary_path, result.summary.dump(2) + "\n");
  return result;
}

AuditResult RunAudit(const AuditConfig& config, Execution execution) {
  AuditResult result;
  result.all_passed = true;
  nlohmann::json checks = nlohmann::json::array();
  for (const std::string& name : config.checks) {
    bool passed = false;
    nlohmann::json details;
    if (name == "noise_distribution") {
      details = NoiseDistributionCheck(config, execution, &passed);
    } else if (name == "laplace_tail") {
      details = TailCheck(config, execution, &passed);
    } else if (name == "empirical_epsilon") {
      details = EpsilonCheck(config, execution, &passed);
    } else {
      throw ConfigError("unknown check " + name);
    }
    result.all_passed = result.all_passed && passed;
    checks.push_back(CheckRecord(name, passed, std::move(details)));
  }
  result.report = {{"seed", config.seed},
                   {"negative_control", config.negative_control},
                   {"checks", checks},
                   {"all_passed", result.all_passed}};
  std::filesystem::create_directories(config.out);
  result.path = JoinPath(config.out, kAuditJsonName);
  WriteFileAtomically(result.path, result.report.dump(2) + "\n");
  return result;
}

}  // namespace dpolo
