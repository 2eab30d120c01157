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

// Trial-level parallelism. Every Monte Carlo loop in the library funnels
// through ForEachTrial so the OpenMP path and the serial reference path run
// the same per-trial body. Bodies write into per-trial slots and callers
// reduce in index order, which keeps results independent of thread count.

#ifndef DPOLO_PARALLEL_H_
#define DPOLO_PARALLEL_H_

#include <cstdint>
#include <exception>
#include <mutex>
#include <string_view>

namespace dpolo {

enum class Execution { kSerial, kParallel };

std::string_view ToString(Execution execution);

// Sets the OpenMP team size for subsequent parallel loops (0 keeps the
// runtime default).
void SetThreadCount(int threads);
int MaxThreads();

template <typename Body>
void ForEachTrial(std::int64_t trials, Execution execution, Body&& body) {
  if (execution == Execution::kSerial) {
    for (std::int64_t i = 0; i < trials; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < trials; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dpolo

#endif  // DPOLO_PARALLEL_H_
