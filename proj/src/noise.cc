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

#include "dpolo/noise.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "dpolo/errors.h"

namespace dpolo {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void CheckScale(double scale, const char* what) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError(std::string(what) + " must be a positive finite real");
  }
}

void CheckNoiseDim(int dim) {
  if (dim < 1) throw ParameterError("noise dimension must be >= 1");
}

}  // namespace

int SeededRng::UniformIndex(int n) {
  // Lemire's multiply-shift; the bias for n < 2^32 is below 2^-32.
  const unsigned __int128 m =
      static_cast<unsigned __int128>(NextU64()) * static_cast<std::uint64_t>(n);
  return static_cast<int>(m >> 64);
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t trial,
                         std::string_view tag) {
  return SplitMix64(SplitMix64(master ^ Fnv1a(tag)) + SplitMix64(trial));
}

double SampleLaplace(double lambda, SeededRng& rng) {
  const double u = rng.UniformOpen01() - 0.5;
  const double mag = -lambda * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

std::string_view ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kLaplace:
      return "laplace";
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kZero:
      return "zero";
  }
  return "unknown";
}

NoiseSpec NoiseSpec::Laplace(double lambda, int dim) {
  CheckScale(lambda, "laplace lambda");
  CheckNoiseDim(dim);
  return NoiseSpec(NoiseKind::kLaplace, lambda, dim);
}

NoiseSpec NoiseSpec::Gaussian(double sigma, int dim) {
  CheckScale(sigma, "gaussian sigma");
  CheckNoiseDim(dim);
  return NoiseSpec(NoiseKind::kGaussian, sigma, dim);
}

NoiseSpec NoiseSpec::Zero(int dim) {
  CheckNoiseDim(dim);
  return NoiseSpec(NoiseKind::kZero, 0.0, dim);
}

double NoiseSpec::CoordinateVariance() const {
  switch (kind_) {
    case NoiseKind::kLaplace:
      return 2.0 * scale_ * scale_;
    case NoiseKind::kGaussian:
      return scale_ * scale_;
    case NoiseKind::kZero:
      return 0.0;
  }
  return 0.0;
}

void AddSample(const NoiseSpec& spec, SeededRng& rng, Vector& acc) {
  if (acc.size() != spec.dim()) {
    throw ContractError("noise accumulator has the wrong dimension");
  }
  switch (spec.kind()) {
    case NoiseKind::kLaplace:
      for (int i = 0; i < spec.dim(); ++i) {
        acc[i] += SampleLaplace(spec.scale(), rng);
      }
      break;
    case NoiseKind::kGaussian:
      for (int i = 0; i < spec.dim(); ++i) {
        acc[i] += spec.scale() * rng.StandardNormal();
      }
      break;
    case NoiseKind::kZero:
      break;
  }
}

Vector Sample(const NoiseSpec& spec, SeededRng& rng) {
  Vector v = Vector::Zero(spec.dim());
  AddSample(spec, rng, v);
  return v;
}

void PrivacyParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be a positive finite real");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ParameterError("delta must lie in [0, 1)");
  }
}

int CeilLog2Horizon(std::int64_t horizon) {
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  const auto t = static_cast<std::uint64_t>(horizon);
  const int ceil_log2 = t == 1 ? 0 : std::bit_width(t - 1);
  return ceil_log2 < 1 ? 1 : ceil_log2;
}

double LaplaceLambdaFor(const PrivacyParams& privacy, double y_norm_1,
                        std::int64_t horizon) {
  privacy.Validate();
  if (horizon < 2) throw ParameterError("horizon must be >= 2");
  if (!(y_norm_1 >= 0.0)) throw ParameterError("||Y||_1 must be nonnegative");
  return y_norm_1 * CeilLog2Horizon(horizon) / privacy.epsilon;
}

GaussianSigmaTerms GaussianSigmaTermsFor(const PrivacyParams& privacy,
                                         double y_norm_2, int dim,
                                         std::int64_t horizon) {
  privacy.Validate();
  if (privacy.delta == 0.0) {
    throw ParameterError(
        "gaussian noise needs delta > 0; (epsilon, 0) is not supported");
  }
  if (horizon < 2) throw ParameterError("horizon must be >= 2");
  if (dim < 1) throw ParameterError("dimension must be >= 1");
  const double log_t = CeilLog2Horizon(horizon);
  const double sqrt_n = std::sqrt(static_cast<double>(dim));
  GaussianSigmaTerms terms;
  terms.regret_branch =
      y_norm_2 * std::sqrt(static_cast<double>(horizon) / (sqrt_n * log_t));
  terms.privacy_branch =
      sqrt_n / privacy.epsilon * log_t * std::log(log_t / privacy.delta);
  terms.sigma = std::max(terms.regret_branch, terms.privacy_branch);
  return terms;
}

double GaussianSigmaFor(const PrivacyParams& privacy, double y_norm_2, int dim,
                        std::int64_t horizon) {
  return GaussianSigmaTermsFor(privacy, y_norm_2, dim, horizon).sigma;
}

}  // namespace dpolo
