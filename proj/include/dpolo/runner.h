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

#ifndef DPOLO_RUNNER_H_
#define DPOLO_RUNNER_H_

#include <string>
#include <vector>

#include "dpolo/config.h"
#include "dpolo/parallel.h"
#include "dpolo/sim.h"
#include "json.hpp"

namespace dpolo {

inline constexpr char kRegretCsvName[] = "regret.csv";
inline constexpr char kSummaryJsonName[] = "summary.json";
inline constexpr char kAuditJsonName[] = "audit.json";

// Header: T_checkpoint,mean_regret,stderr,p10,p90.
std::string FormatRegretCsv(const std::vector<CheckpointStats>& rows);
std::vector<CheckpointStats> ParseRegretCsv(const std::string& text);

struct ExperimentResult {
  GameStats stats;
  DerivedParams derived;
  nlohmann::json summary;
  std::string csv_path;
  std::string summary_path;
};

// Runs every trial, then writes <out>/regret.csv and <out>/summary.json. No
// file is touched when the run fails.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               Execution execution = Execution::kParallel);

struct AuditResult {
  nlohmann::json report;
  bool all_passed = false;
  std::string path;
};

// Check failures are recorded in the report, not thrown.
AuditResult RunAudit(const AuditConfig& config,
                     Execution execution = Execution::kParallel);

// Writes text to path via a temporary file and rename.
void WriteFileAtomically(const std::string& path, const std::string& text);

}  // namespace dpolo

#endif  // DPOLO_RUNNER_H_
