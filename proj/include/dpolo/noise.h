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

// Noise distributions with the parameterizations the privacy guarantees are
// stated in, plus a seeded random source.

#ifndef DPOLO_NOISE_H_
#define DPOLO_NOISE_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "dpolo/geometry.h"

namespace dpolo {

// Reproducible random source. Two instances built from the same seed emit
// identical sequences.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t NextU64() {
    ++draws_;
    return engine_();
  }
  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double UniformOpen01() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }
  double StandardNormal() {
    ++draws_;
    return normal_(engine_);
  }
  // Uniform integer in [0, n).
  int UniformIndex(int n);

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Mixes (master seed, trial index, tag) into an independent stream seed.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t trial,
                         std::string_view tag);

// Lap(lambda) via the inverse CDF.
double SampleLaplace(double lambda, SeededRng& rng);

enum class NoiseKind { kLaplace, kGaussian, kZero };

std::string_view ToString(NoiseKind kind);

// Per-coordinate i.i.d. noise over R^dim. kZero is a test hook that makes a
// mechanism deterministic.
class NoiseSpec {
 public:
  static NoiseSpec Laplace(double lambda, int dim);
  static NoiseSpec Gaussian(double sigma, int dim);
  static NoiseSpec Zero(int dim);

  NoiseKind kind() const { return kind_; }
  double scale() const { return scale_; }
  int dim() const { return dim_; }

  // 2 lambda^2 for Laplace, sigma^2 for Gaussian, 0 for the zero hook.
  double CoordinateVariance() const;

 private:
  NoiseSpec(NoiseKind kind, double scale, int dim)
      : kind_(kind), scale_(scale), dim_(dim) {}

  NoiseKind kind_;
  double scale_;
  int dim_;
};

Vector Sample(const NoiseSpec& spec, SeededRng& rng);

// acc += one draw from spec, without allocating.
void AddSample(const NoiseSpec& spec, SeededRng& rng, Vector& acc);

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;

  // Throws ParameterError unless epsilon > 0 and delta in [0, 1).
  void Validate() const;
};

// max(1, ceil(log2 T)): the number of noise draws carried by every private
// prefix-sum release, and the "log T" of every noise-scale formula.
int CeilLog2Horizon(std::int64_t horizon);

// lambda = ||Y||_1 ceil(log2 T) / epsilon.
double LaplaceLambdaFor(const PrivacyParams& privacy, double y_norm_1,
                        std::int64_t horizon);

struct GaussianSigmaTerms {
  double regret_branch = 0.0;
  double privacy_branch = 0.0;
  double sigma = 0.0;
};

// sigma = max{ ||Y||_2 sqrt(T / (sqrt(N) log T)),
//              (sqrt(N) / epsilon) log T ln(log T / delta) }.
GaussianSigmaTerms GaussianSigmaTermsFor(const PrivacyParams& privacy,
                                         double y_norm_2, int dim,
                                         std::int64_t horizon);

double GaussianSigmaFor(const PrivacyParams& privacy, double y_norm_2, int dim,
                        std::int64_t horizon);

}  // namespace dpolo

#endif  // DPOLO_NOISE_H_
