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

#include "dpolo/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpolo/errors.h"
#include "dpolo/stats.h"

namespace dpolo {
namespace {

constexpr std::int64_t kChunk = 4096;

std::int64_t ChunkCount(std::int64_t samples) {
  return (samples + kChunk - 1) / kChunk;
}

double BinomialLowerBound(std::int64_t k, std::int64_t n, double confidence) {
  if (k == 0) return 0.0;
  return 1.0 - stats::BinomialUpperBound(n - k, n, confidence);
}

// Projected releases of one tree run over the given stream.
void SampleReleases(const EpsilonRequest& request,
                    const std::vector<Vector>& losses, std::int64_t round,
                    std::string_view tag, std::vector<double>& out) {
  const std::int64_t chunks = ChunkCount(request.samples);
  ForEachTrial(chunks, request.execution, [&](std::int64_t c) {
    SeededRng rng(DeriveSeed(request.seed, static_cast<std::uint64_t>(c), tag));
    const std::int64_t end = std::min(request.samples, (c + 1) * kChunk);
    for (std::int64_t s = c * kChunk; s < end; ++s) {
      NoiseTree tree(request.horizon, request.spec, request.bound, rng);
      PrivateSumEstimate release;
      for (std::int64_t t = 0; t < round; ++t) {
        release = tree.InsertAndRelease(losses[t], rng);
      }
      out[s] = release.estimate[request.coordinate];
    }
  });
}

}  // namespace

NoiseDistributionReport NoiseDistributionTest(
    const NoiseDistributionRequest& request) {
  if (request.samples < 10000) {
    throw ContractError("noise distribution test needs at least 10^4 samples");
  }
  if (request.horizon < 2) throw ContractError("horizon must be >= 2");
  const std::int64_t horizon = request.horizon;
  const int dim = request.spec.dim();
  const int depth = CeilLog2Horizon(horizon);

  std::vector<std::int64_t> rounds = {1, horizon / 2, horizon};
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());

  const auto n = static_cast<std::size_t>(request.samples);
  // released[r][k * n + s]: coordinate k of sample s at rounds[r].
  std::vector<std::vector<double>> released(
      rounds.size(), std::vector<double>(n * static_cast<std::size_t>(dim)));
  std::vector<double> reference(n);
  const LossBound bound{LossBound::Norm::kLinf, 1.0};
  const Vector zero = Vector::Zero(dim);

  ForEachTrial(ChunkCount(request.samples), request.execution,
               [&](std::int64_t c) {
    SeededRng rng(DeriveSeed(request.seed, c, "noise_distribution/tree"));
    SeededRng ref_rng(
        DeriveSeed(request.seed, c, "noise_distribution/reference"));
    const std::int64_t end = std::min(request.samples, (c + 1) * kChunk);
    for (std::int64_t s = c * kChunk; s < end; ++s) {
      NoiseTree tree(horizon, request.spec, bound, rng, request.tree);
      std::size_t r = 0;
      for (std::int64_t t = 1; t <= horizon && r < rounds.size(); ++t) {
        const PrivateSumEstimate e = tree.InsertAndRelease(zero, rng);
        if (t == rounds[r]) {
          for (int k = 0; k < dim; ++k) {
            released[r][static_cast<std::size_t>(k) * n + s] = e.estimate[k];
          }
          ++r;
        }
      }
      Vector direct = Vector::Zero(dim);
      for (int i = 0; i < depth; ++i) AddSample(request.spec, ref_rng, direct);
      reference[s] = direct[0];
    }
  });

  NoiseDistributionReport report;
  report.horizon = horizon;
  report.depth = depth;
  report.passed = true;
  const double target = depth * request.spec.CoordinateVariance();
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    RoundNoiseCheck check;
    check.round = rounds[r];
    check.cover_size = CoverSize(rounds[r], horizon);
    check.target_variance = target;
    for (int k = 0; k < dim; ++k) {
      const std::span<const double> col(
          released[r].data() + static_cast<std::size_t>(k) * n, n);
      const double v = stats::Variance(col);
      const double rel =
          target > 0.0 ? std::abs(v - target) / target : std::abs(v);
      check.max_relative_error = std::max(check.max_relative_error, rel);
    }
    check.variance_ok = check.max_relative_error <= request.variance_tolerance;
    const stats::KsResult ks = stats::KsTwoSample(
        std::vector<double>(released[r].begin(), released[r].begin() + n),
        reference);
    check.ks_statistic = ks.statistic;
    check.ks_p_value = ks.p_value;
    check.ks_ok = ks.p_value > request.ks_alpha;
    report.passed = report.passed && check.variance_ok && check.ks_ok;
    report.rounds.push_back(check);
  }
  return report;
}

LaplaceTailReport LaplaceTailCheck(const LaplaceTailRequest& request) {
  if (!(request.lambda > 0.0) || request.dim < 1 || request.horizon < 2 ||
      request.samples < 1) {
    throw ContractError("tail check needs lambda > 0, N >= 1, T >= 2");
  }
  const double log_tn =
      std::log(static_cast<double>(request.horizon) * request.dim);
  LaplaceTailReport report;
  report.threshold =
      request.threshold_constant * request.lambda * request.lambda * log_tn *
      log_tn;
  report.samples = request.samples;
  const std::int64_t chunks = ChunkCount(request.samples);
  std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
  ForEachTrial(chunks, request.execution, [&](std::int64_t c) {
    SeededRng rng(DeriveSeed(request.seed, c, "laplace_tail"));
    const std::int64_t end = std::min(request.samples, (c + 1) * kChunk);
    std::int64_t local = 0;
    for (std::int64_t s = c * kChunk; s < end; ++s) {
      double max_sq = 0.0;
      for (int i = 0; i < request.dim; ++i) {
        const double z = SampleLaplace(request.lambda, rng);
        max_sq = std::max(max_sq, z * z);
      }
      if (max_sq >= report.threshold) ++local;
    }
    hits[c] = local;
  });
  for (std::int64_t h : hits) report.hits += h;
  report.frequency =
      static_cast<double>(report.hits) / static_cast<double>(report.samples);
  report.upper_bound = stats::BinomialUpperBound(report.hits, report.samples,
                                                 request.confidence);
  report.target = 1.0 / (static_cast<double>(request.horizon) *
                         static_cast<double>(request.horizon));
  report.passed = report.upper_bound <= report.target;
  return report;
}

EpsilonRequest ToyEpsilonRequest(double epsilon, std::int64_t samples,
                                 std::uint64_t seed) {
  EpsilonRequest request;
  request.horizon = 4;
  request.spec =
      NoiseSpec::Laplace(LaplaceLambdaFor({epsilon, 0.0}, 1.0, 4), 1);
  request.losses.assign(4, Vector::Zero(1));
  request.neighbor_losses = request.losses;
  request.neighbor_losses[0][0] = 1.0;
  request.samples = samples;
  request.seed = seed;
  return request;
}

EpsilonEstimate EmpiricalEpsilon(const EpsilonRequest& request) {
  const std::int64_t round = request.round == 0 ? request.horizon : request.round;
  if (round < 1 || round > request.horizon ||
      static_cast<std::int64_t>(request.losses.size()) < round ||
      static_cast<std::int64_t>(request.neighbor_losses.size()) < round) {
    throw ContractError("projection round is not covered by both sequences");
  }
  if (request.coordinate < 0 || request.coordinate >= request.spec.dim()) {
    throw ContractError("projection coordinate out of range");
  }
  if (request.bins < 2 || request.samples < request.bins) {
    throw ContractError("need at least two bins and one sample per bin");
  }
  int differing = 0;
  for (std::int64_t t = 0; t < request.horizon && t < static_cast<std::int64_t>(
                               std::min(request.losses.size(),
                                        request.neighbor_losses.size()));
       ++t) {
    if (request.losses[t] != request.neighbor_losses[t]) ++differing;
  }
  if (differing > 1) {
    throw ContractError("the pair must differ in at most one round");
  }

  const auto n = static_cast<std::size_t>(request.samples);
  std::vector<double> a(n);
  std::vector<double> b(n);
  SampleReleases(request, request.losses, round, "epsilon/L", a);
  SampleReleases(request, request.neighbor_losses, round, "epsilon/L'", b);

  EpsilonEstimate est;
  est.confidence = request.confidence;
  std::vector<double> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 1; i < request.bins; ++i) {
    est.bin_edges.push_back(sorted[static_cast<std::size_t>(i) * n /
                                   static_cast<std::size_t>(request.bins)]);
  }
  est.bin_edges.erase(std::unique(est.bin_edges.begin(), est.bin_edges.end()),
                      est.bin_edges.end());

  auto count = [&](const std::vector<double>& xs) {
    std::vector<std::int64_t> c(est.bin_edges.size() + 1, 0);
    for (double x : xs) {
      const auto it =
          std::lower_bound(est.bin_edges.begin(), est.bin_edges.end(), x);
      ++c[static_cast<std::size_t>(it - est.bin_edges.begin())];
    }
    return c;
  };
  std::vector<std::int64_t> ca = count(a);
  std::vector<std::int64_t> cb = count(b);

  // Merge runs of bins that are thin under both inputs.
  std::vector<double> edges;
  std::vector<std::int64_t> ma;
  std::vector<std::int64_t> mb;
  int merged = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const bool thin = ca[i] < request.min_bin_count &&
                      cb[i] < request.min_bin_count;
    const bool prev_thin = !ma.empty() && ma.back() < request.min_bin_count &&
                           mb.back() < request.min_bin_count;
    if (!ma.empty() && (thin || prev_thin)) {
      ma.back() += ca[i];
      mb.back() += cb[i];
      ++merged;
    } else {
      if (i > 0) edges.push_back(est.bin_edges[i - 1]);
      ma.push_back(ca[i]);
      mb.push_back(cb[i]);
    }
  }
  if (merged > 0) {
    est.warnings.push_back("merged " + std::to_string(merged) +
                           " low-mass bins");
  }
  est.bin_edges = edges;
  est.counts = ma;
  est.neighbor_counts = mb;

  const double level =
      1.0 - (1.0 - request.confidence) / (2.0 * static_cast<double>(ma.size()));
  const double inf = std::numeric_limits<double>::infinity();
  int skipped = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const std::int64_t lo = std::min(ma[i], mb[i]);
    const std::int64_t hi = std::max(ma[i], mb[i]);
    const double pa_lo = BinomialLowerBound(ma[i], request.samples, level);
    const double pa_hi = stats::BinomialUpperBound(ma[i], request.samples, level);
    const double pb_lo = BinomialLowerBound(mb[i], request.samples, level);
    const double pb_hi = stats::BinomialUpperBound(mb[i], request.samples, level);
    const double lower = std::max({0.0, std::log(pa_lo / pb_hi),
                                   std::log(pb_lo / pa_hi)});
    est.epsilon_lower = std::max(est.epsilon_lower, lower);
    if (lo >= request.min_bin_count) {
      est.epsilon_hat = std::max(
          est.epsilon_hat,
          std::abs(std::log(static_cast<double>(ma[i]) /
                            static_cast<double>(mb[i]))));
    } else if (lo == 0 && hi >= request.min_bin_count) {
      est.epsilon_hat = inf;
      est.warnings.push_back("a populated bin is empty under the other input");
    } else {
      ++skipped;
    }
  }
  if (skipped > 0) {
    est.warnings.push_back("skipped " + std::to_string(skipped) +
                           " bins with fewer than " +
                           std::to_string(request.min_bin_count) +
                           " samples on one side");
  }
  return est;
}

nlohmann::json ToJson(const NoiseDistributionReport& report) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const RoundNoiseCheck& r : report.rounds) {
    rounds.push_back({{"round", r.round},
                      {"cover_size", r.cover_size},
                      {"target_variance", r.target_variance},
                      {"max_relative_error", r.max_relative_error},
                      {"ks_statistic", r.ks_statistic},
                      {"ks_p_value", r.ks_p_value},
                      {"variance_ok", r.variance_ok},
                      {"ks_ok", r.ks_ok}});
  }
  return {{"horizon", report.horizon},
          {"depth", report.depth},
          {"rounds", rounds},
          {"passed", report.passed}};
}

nlohmann::json ToJson(const LaplaceTailReport& report) {
  return {{"threshold", report.threshold},   {"hits", report.hits},
          {"samples", report.samples},       {"frequency", report.frequency},
          {"upper_bound", report.upper_bound}, {"target", report.target},
          {"passed", report.passed}};
}

nlohmann::json ToJson(const EpsilonEstimate& estimate) {
  nlohmann::json j = {{"epsilon_lower", estimate.epsilon_lower},
                      {"confidence", estimate.confidence},
                      {"bins", estimate.counts.size()},
                      {"bin_edges", estimate.bin_edges},
                      {"counts", estimate.counts},
                      {"neighbor_counts", estimate.neighbor_counts},
                      {"warnings", estimate.warnings}};
  // JSON has no infinity.
  if (std::isfinite(estimate.epsilon_hat)) {
    j["epsilon_hat"] = estimate.epsilon_hat;
  } else {
    j["epsilon_hat"] = "inf";
  }
  return j;
}

}  // namespace dpolo
