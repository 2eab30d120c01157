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

#include "dpolo/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "dpolo/errors.h"

namespace dpolo {

namespace stats {

double Mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

double Variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = Mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / (xs.size() - 1);
}

double StdError(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return std::sqrt(Variance(xs) / xs.size());
}

double Quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ContractError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * (xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - lo;
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double KolmogorovSurvival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult KsTwoSample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ContractError("KS test needs two samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size();
  const double nb = b.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sqrt_ne = std::sqrt(ne);
  // Stephens' small-sample correction.
  const double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
  return {d, KolmogorovSurvival(lambda)};
}

KsResult KsOneSample(std::vector<double> xs,
                     const std::function<double(double)>& cdf) {
  if (xs.empty()) throw ContractError("KS test needs a sample");
  std::sort(xs.begin(), xs.end());
  const double n = xs.size();
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sqrt_n = std::sqrt(n);
  return {d, KolmogorovSurvival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

double BinomialUpperBound(std::int64_t successes, std::int64_t trials,
                          double confidence) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw ContractError("binomial bound needs 0 <= successes <= trials > 0");
  }
  if (successes == trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                static_cast<double>(trials - successes),
                                confidence);
}

LinearFit LeastSquares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ContractError("least squares needs >= 2 paired points");
  }
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ContractError("least squares with constant abscissa");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace stats
}  // namespace dpolo
