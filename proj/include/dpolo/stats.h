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

// Small statistics toolkit for the Monte Carlo checks.

#ifndef DPOLO_STATS_H_
#define DPOLO_STATS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dpolo::stats {

double Mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance; 0 for fewer than two samples.
double Variance(std::span<const double> xs);
double StdError(std::span<const double> xs);
// Linear interpolation between order statistics, q in [0, 1].
double Quantile(std::vector<double> xs, double q);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double KolmogorovSurvival(double lambda);

KsResult KsTwoSample(std::vector<double> a, std::vector<double> b);
KsResult KsOneSample(std::vector<double> xs,
                     const std::function<double(double)>& cdf);

// One-sided upper Clopper-Pearson bound on a binomial proportion.
double BinomialUpperBound(std::int64_t successes, std::int64_t trials,
                          double confidence);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit LeastSquares(std::span<const double> x, std::span<const double> y);

}  // namespace dpolo::stats

#endif  // DPOLO_STATS_H_
