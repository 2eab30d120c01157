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

// dpolo: run private online linear optimization experiments and audits.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpolo/config.h"
#include "dpolo/errors.h"
#include "dpolo/noise.h"
#include "dpolo/parallel.h"
#include "dpolo/runner.h"
#include "dpolo/tree_agg.h"
#include "json.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> out;
  int threads = 0;
  std::vector<std::string> overrides;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags* f, bool experiment) {
  cmd->add_option("--config", f->config_path, "key = value config file");
  cmd->add_option("--seed", f->seed, "master seed (default: $DPOLO_SEED)");
  if (experiment) cmd->add_option("--trials", f->trials, "number of trials");
  cmd->add_option("--out", f->out, "output directory");
  cmd->add_option("--threads", f->threads, "OpenMP threads (0: runtime default)");
  cmd->add_option("--override", f->overrides, "KEY=VAL, applied last")
      ->take_all();
}

std::string ErrorKind(const dpolo::Error& e) {
  if (dynamic_cast<const dpolo::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const dpolo::ParameterError*>(&e)) return "parameter";
  if (dynamic_cast<const dpolo::NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const dpolo::PrivacyContractError*>(&e)) {
    return "privacy_contract";
  }
  if (dynamic_cast<const dpolo::ProtocolError*>(&e)) return "protocol";
  if (dynamic_cast<const dpolo::UnsupportedError*>(&e)) return "unsupported";
  if (dynamic_cast<const dpolo::InputError*>(&e)) return "input";
  if (dynamic_cast<const dpolo::ContractError*>(&e)) return "contract";
  return "error";
}

// File, then DPOLO_SEED if the file has no seed, then --override, then the
// dedicated flags.
dpolo::KeyValues CollectValues(const CommonFlags& f, bool experiment) {
  dpolo::KeyValues kv;
  if (!f.config_path.empty()) kv = dpolo::ReadKeyValuesFile(f.config_path);
  bool has_seed = false;
  for (const auto& [k, v] : kv) has_seed = has_seed || k == "seed";
  if (!has_seed && !f.seed) {
    if (const char* env = std::getenv("DPOLO_SEED"); env && *env) {
      kv.emplace_back("seed", env);
    }
  }
  const auto& names = dpolo::OverridableParams();
  for (const std::string& o : f.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw dpolo::ConfigError("--override expects KEY=VAL, got '" + o + "'");
    }
    std::string key = o.substr(0, eq);
    if (experiment &&
        std::find(names.begin(), names.end(), key) != names.end()) {
      key = "override." + key;
    }
    kv.emplace_back(key, o.substr(eq + 1));
  }
  if (f.seed) kv.emplace_back("seed", std::to_string(*f.seed));
  if (f.trials) kv.emplace_back("trials", std::to_string(*f.trials));
  if (f.out) kv.emplace_back("out", *f.out);
  return kv;
}

void ApplyThreads(int threads) {
  if (threads < 0) throw dpolo::ConfigError("--threads must be >= 0");
  if (threads > 0) dpolo::SetThreadCount(threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private online linear optimization toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run an experiment");
  AddCommonFlags(run, &run_flags, true);

  CommonFlags audit_flags;
  bool negative_control = false;
  std::string checks;
  CLI::App* audit = app.add_subcommand("audit", "run the privacy audit suite");
  AddCommonFlags(audit, &audit_flags, false);
  audit->add_flag("--negative-control", negative_control,
                  "break each mechanism so its check must fail");
  audit->add_option("--checks", checks, "comma-separated subset of checks");

  app.add_subcommand("list-settings", "print supported setting/algorithm pairs");

  CommonFlags derived_flags;
  CLI::App* derived =
      app.add_subcommand("print-derived-params", "resolve and print lambda, sigma, eta, gamma");
  AddCommonFlags(derived, &derived_flags, true);

  std::int64_t dump_horizon = 8;
  std::int64_t dump_rounds = -1;
  double dump_lambda = 1.0;
  std::uint64_t dump_seed = 0;
  bool unsafe_dump_noise = false;
  CLI::App* dump = app.add_subcommand(
      "dump-tree", "print the tree layout after feeding zero losses");
  dump->add_option("--T", dump_horizon, "horizon");
  dump->add_option("--rounds", dump_rounds, "rounds to feed (default T)");
  dump->add_option("--lambda", dump_lambda, "Laplace scale");
  dump->add_option("--seed", dump_seed, "seed");
  dump->add_flag("--unsafe-dump-noise", unsafe_dump_noise,
                 "include partial sums and noise draws (never for real data)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ApplyThreads(run_flags.threads);
      const dpolo::ExperimentConfig config =
          dpolo::BuildExperimentConfig(CollectValues(run_flags, true));
      const dpolo::ExperimentResult result = dpolo::RunExperiment(config);
      std::cout << result.csv_path << "\n" << result.summary_path << "\n";
    } else if (audit->parsed()) {
      ApplyThreads(audit_flags.threads);
      dpolo::KeyValues kv = CollectValues(audit_flags, false);
      if (negative_control) kv.emplace_back("negative_control", "true");
      if (!checks.empty()) kv.emplace_back("checks", checks);
      const dpolo::AuditResult result =
          dpolo::RunAudit(dpolo::BuildAuditConfig(kv));
      for (const auto& c : result.report["checks"]) {
        std::cout << c["check"].get<std::string>() << ": "
                  << c["status"].get<std::string>() << "\n";
      }
      std::cout << result.path << "\n";
    } else if (app.got_subcommand("list-settings")) {
      std::cout << dpolo::SupportedMatrixText();
    } else if (derived->parsed()) {
      const dpolo::ExperimentConfig config =
          dpolo::BuildExperimentConfig(CollectValues(derived_flags, true));
      nlohmann::json j = {
          {"config", nlohmann::json::object()},
          {"derived", dpolo::ToJson(dpolo::ResolveDerivedParams(config))}};
      for (const auto& [k, v] : dpolo::EchoConfig(config)) j["config"][k] = v;
      std::cout << j.dump(2) << "\n";
    } else if (dump->parsed()) {
      dpolo::SeededRng rng(dump_seed);
      dpolo::NoiseTree tree(dump_horizon, dpolo::NoiseSpec::Laplace(dump_lambda, 1),
                            {dpolo::LossBound::Norm::kLinf, 1.0}, rng);
      const std::int64_t rounds = dump_rounds < 0 ? dump_horizon : dump_rounds;
      for (std::int64_t t = 0; t < rounds; ++t) {
        tree.InsertAndRelease(dpolo::Vector::Zero(1), rng);
      }
      std::cout << tree.DebugDump(unsafe_dump_noise).dump(2) << "\n";
    }
  } catch (const dpolo::Error& e) {
    nlohmann::json record = {{"error", ErrorKind(e)}, {"message", e.what()}};
    std::cerr << record.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json record = {{"error", "internal"}, {"message", e.what()}};
    std::cerr << record.dump() << "\n";
    return 3;
  }
  return 0;
}
