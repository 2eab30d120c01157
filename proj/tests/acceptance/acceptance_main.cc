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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dpolo/audit.h"
#include "dpolo/bandit.h"
#include "dpolo/config.h"
#include "dpolo/full_info.h"
#include "dpolo/sim.h"
#include "dpolo/tree_agg.h"

namespace dpolo {
namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Mean final regret of one configuration, run at exactly the given horizon.
double MeanRegretAt(const std::string& text, std::int64_t horizon,
                    std::int64_t trials) {
  ExperimentConfig config = ParseExperimentConfig(text);
  config.horizon = horizon;
  config.trials = trials;
  const DerivedParams derived = ResolveDerivedParams(config);
  GameRequest request;
  request.player = MakePlayerFactory(config, derived);
  request.adversary = config.adversary;
  request.horizon = horizon;
  request.trials = trials;
  request.seed = config.seed;
  request.algorithm_tag = std::string(ToString(config.algorithm));
  request.checkpoints = {horizon};
  return RunGame(request).checkpoints.back().mean_regret;
}

double Slope(const std::vector<double>& ts, const std::vector<double>& rs) {
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < ts.size(); ++i) points.emplace_back(ts[i], rs[i]);
  return RegretSlope(points).slope;
}

Outcome TreeExactness() {
  std::int64_t mismatches = 0;
  std::int64_t releases = 0;
  for (std::int64_t horizon = 1; horizon <= 1024; ++horizon) {
    SeededRng rng(static_cast<std::uint64_t>(horizon));
    NoiseTree tree(horizon, NoiseSpec::Zero(2), {LossBound::Norm::kLinf, 1.0},
                   rng);
    Vector prefix = Vector::Zero(2);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      // Eighth-grid values keep every partial sum exact in binary.
      Vector l(2);
      l << ((t * 5) % 17 - 8) / 8.0, ((t * 3 + horizon) % 13 - 6) / 8.0;
      prefix += l;
      const PrivateSumEstimate est = tree.InsertAndRelease(l, rng);
      ++releases;
      if (est.estimate != prefix) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(releases) + " releases, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome NoiseDistribution() {
  bool ok = true;
  std::string detail;
  for (std::int64_t horizon : {2, 8, 64}) {
    NoiseDistributionRequest request;
    request.horizon = horizon;
    request.spec = NoiseSpec::Laplace(1.0, 1);
    request.samples = 100000;
    request.seed = DeriveSeed(2, horizon, "acceptance");
    const NoiseDistributionReport report = NoiseDistributionTest(request);
    double worst_err = 0.0;
    double min_p = 1.0;
    for (const RoundNoiseCheck& r : report.rounds) {
      worst_err = std::max(worst_err, r.max_relative_error);
      min_p = std::min(min_p, r.ks_p_value);
    }
    ok = ok && report.passed;
    detail += "T=" + std::to_string(horizon) + " err=" + Fmt(worst_err) +
              " p=" + Fmt(min_p) + "; ";
    if (horizon > 2) {
      // No round has a short cover at T=2, so the control only bites above.
      request.tree.topup_enabled = false;
      const bool control_failed = !NoiseDistributionTest(request).passed;
      ok = ok && control_failed;
      detail += std::string("no-topup ") +
                (control_failed ? "fails" : "PASSES") + "; ";
    }
  }
  return {ok, detail};
}

Outcome OneShot() {
  AdversarySpec spec;
  spec.dim = 3;
  OneShotRequest request;
  request.losses = GenerateLosses(spec, 3, 64);
  request.lambda = 2.0;
  request.trials = 100000;
  request.seed = 3;
  const OneShotReport r = OneShotEquivalenceCheck(request);
  return {r.within_three_se, "tree=" + Fmt(r.mean_tree) + " one-shot=" +
                                 Fmt(r.mean_one_shot) + " diff=" +
                                 Fmt(r.difference) + " SE=" +
                                 Fmt(r.pooled_stderr)};
}

Outcome SqrtLaw() {
  const std::string base =
      "setting = experts\nN = 10\nepsilon = 1\nseed = 4\n"
      "adversary = worst_case_experts\n";
  const std::vector<double> ts = {1024, 4096, 16384};
  std::vector<double> priv;
  std::vector<double> diff;
  for (double t : ts) {
    const auto horizon = static_cast<std::int64_t>(t);
    const double p = MeanRegretAt(base + "algorithm = ftrl\n", horizon, 200);
    const double np =
        MeanRegretAt(base + "algorithm = nonprivate_baseline\n", horizon, 200);
    priv.push_back(p);
    diff.push_back(p - np);
  }
  const double slope = Slope(ts, priv);
  const double diff_slope = Slope(ts, diff);
  const bool ok = slope >= 0.4 && slope <= 0.6 && diff_slope < 0.25;
  return {ok, "private " + Fmt(priv[0]) + "," + Fmt(priv[1]) + "," +
                  Fmt(priv[2]) + " slope=" + Fmt(slope) +
                  " (want [0.4,0.6]); difference slope=" + Fmt(diff_slope) +
                  " (want <0.25)"};
}

Outcome NoisyOco() {
  NoisyOcoRequest request;
  const int n = 5;
  const std::int64_t horizon = 512;
  request.learner = [=] {
    return std::make_unique<Exp2>(n, Exp2Params::ForPrivateMab(n, horizon, 1.0));
  };
  request.adversary.dim = n;
  request.noise = NoiseSpec::Laplace(1.0, n);
  request.horizon = horizon;
  request.trials = 20000;
  request.seed = 5;
  const NoisyOcoReport clean = NoisyOcoCheck(request);
  request.noise_bias = 0.1 * Vector::Unit(n, request.adversary.best_arm);
  const NoisyOcoReport biased = NoisyOcoCheck(request);
  const bool ok = clean.consistent && !biased.consistent;
  return {ok, "CI [" + Fmt(clean.ci_low) + ", " + Fmt(clean.ci_high) +
                  "]; biased diff=" + Fmt(biased.difference) + " SE=" +
                  Fmt(biased.stderr_difference) +
                  (biased.consistent ? " NOT detected" : " detected")};
}

Outcome Exp2Unbiased() {
  double worst = 0.0;
  SeededRng rng(6);
  for (int n = 1; n <= 8; ++n) {
    Exp2 learner(n, Exp2Params::ForPrivateMab(n, 4096, 1.0));
    learner.Play(rng);
    for (int t = 0; t < 200; ++t) {
      const Vector p = learner.p();
      Vector l(n);
      for (int i = 0; i < n; ++i) l[i] = 2.0 * rng.UniformOpen01() - 1.0;
      Vector mean = Vector::Zero(n);
      for (int i = 0; i < n; ++i) mean += p[i] * Exp2::Estimator(p, i, l[i]);
      worst = std::max(worst, (mean - l).lpNorm<Eigen::Infinity>());
      learner.Step(5.0 * (2.0 * rng.UniformOpen01() - 1.0), rng);
    }
  }
  return {worst <= 1e-12, "max error " + Fmt(worst)};
}

Outcome Exp2Scaling() {
  const std::string base =
      "setting = mab\nalgorithm = dp_exp2\nN = 10\nseed = 7\n"
      "adversary = worst_case_experts\n";
  const std::vector<double> ts = {4096, 16384, 65536};
  std::vector<double> rs;
  for (double t : ts) {
    rs.push_back(MeanRegretAt(base + "epsilon = 1\n",
                              static_cast<std::int64_t>(t), 100));
  }
  const double slope = Slope(ts, rs);
  const double low_eps = MeanRegretAt(base + "epsilon = 0.5\n", 16384, 100);
  const double high_eps = MeanRegretAt(base + "epsilon = 2\n", 16384, 100);
  const bool ok = slope >= 0.4 && slope <= 0.7 && low_eps > high_eps;
  return {ok, "regret " + Fmt(rs[0]) + "," + Fmt(rs[1]) + "," + Fmt(rs[2]) +
                  " slope=" + Fmt(slope) + "; eps=0.5 " + Fmt(low_eps) +
                  " vs eps=2 " + Fmt(high_eps)};
}

Outcome ScribbleChecks() {
  // Enumeration over the 2N equally likely perturbations.
  double worst = 0.0;
  SeededRng gen(8);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 100; ++rep) {
      Vector x(n);
      Vector l(n);
      for (int i = 0; i < n; ++i) {
        x[i] = (2.0 * gen.UniformOpen01() - 1.0) * 0.95 / std::sqrt(n);
        l[i] = 2.0 * gen.UniformOpen01() - 1.0;
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
          ball_barrier::Hessian(x));
      Vector mean = Vector::Zero(n);
      for (int i = 0; i < n; ++i) {
        const double lam = eig.eigenvalues()[i];
        const Vector v = eig.eigenvectors().col(i);
        for (double xi : {-1.0, 1.0}) {
          const Vector played = x + xi / std::sqrt(lam) * v;
          mean += Scribble::Estimator(n, l.dot(played), xi, lam, v) / (2.0 * n);
        }
      }
      worst = std::max(worst, (mean - l).lpNorm<Eigen::Infinity>());
    }
  }

  // Interiority along private runs.
  const int n = 3;
  const std::int64_t rounds = 100000;
  const double lambda = std::sqrt(static_cast<double>(n));
  std::int64_t escapes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inner = std::make_unique<Scribble>(
        n, ScribbleParams::ForPrivateBall(n, rounds, 1.0, lambda, 1.0));
    const Scribble* learner = inner.get();
    PrivatizedBandit player(std::move(inner), NoiseSpec::Laplace(lambda, n),
                            lambda, 1.0);
    AdversarySpec spec;
    spec.model = LossModel::kSphere;
    spec.dim = n;
    Adversary adversary(spec, DeriveSeed(seed, 0, "adversary"));
    SeededRng rng(DeriveSeed(seed, 0, "dp_scribble"));
    const Vector* x = &player.Start(rng);
    for (std::int64_t t = 0; t < rounds; ++t) {
      const Vector& it = learner->iterate();
      if (!(it.norm() < 1.0) || !std::isfinite(ball_barrier::Value(it))) {
        ++escapes;
      }
      const double value = adversary.Next().dot(*x);
      if (t + 1 < rounds) {
        x = &player.Step(value, rng);
      } else {
        player.Finish(value, rng);
      }
    }
  }

  const std::string base =
      "setting = linear_bandit\nalgorithm = dp_scribble\nN = 3\nepsilon = 1\n"
      "seed = 8\nadversary = worst_case_experts\n";
  const double r12 = MeanRegretAt(base, 4096, 20);
  const double r14 = MeanRegretAt(base, 16384, 20);
  const double slope = std::log(r14 / r12) / std::log(4.0);
  const bool ok = worst <= 1e-10 && escapes == 0 && slope < 0.75;
  return {ok, "enumeration error " + Fmt(worst) + "; " +
                  std::to_string(escapes) + " non-interior iterates in 20x" +
                  std::to_string(rounds) + " rounds; regret " + Fmt(r12) +
                  "," + Fmt(r14) + " slope=" + Fmt(slope)};
}

Outcome Tail() {
  LaplaceTailRequest request;
  request.lambda = 1.0;
  request.dim = 4;
  request.horizon = 8;
  request.samples = 1000000;
  request.seed = 9;
  const LaplaceTailReport r = LaplaceTailCheck(request);
  return {r.passed, std::to_string(r.hits) + " hits, 99% upper bound " +
                        Fmt(r.upper_bound) + " vs 1/T^2=" + Fmt(r.target)};
}

Outcome EmpiricalEps() {
  const std::vector<double> eps = {0.5, 1.0, 2.0};
  std::vector<double> hats;
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const EpsilonEstimate est =
        EmpiricalEpsilon(ToyEpsilonRequest(eps[i], 1000000, 10 + i));
    hats.push_back(est.epsilon_hat);
    ok = ok && est.epsilon_hat <= eps[i] + 0.2;
    detail += "eps=" + Fmt(eps[i]) + " hat=" + Fmt(est.epsilon_hat) + "; ";
  }
  const bool monotone = hats[0] < hats[1] && hats[1] < hats[2];
  detail += monotone ? "monotone" : "NOT monotone";
  return {ok && monotone, detail};
}

}  // namespace
}  // namespace dpolo

int main() {
  using dpolo::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "tree prefix sums exact", 10, dpolo::TreeExactness},
      {2, "release noise distribution", 120, dpolo::NoiseDistribution},
      {3, "one-shot noise equivalence", 300, dpolo::OneShot},
      {4, "private FTRL sqrt(T) law", 900, dpolo::SqrtLaw},
      {5, "noisy-loss regret identity", 600, dpolo::NoisyOco},
      {6, "EXP2 estimator unbiased", 60, dpolo::Exp2Unbiased},
      {7, "DP-EXP2 scaling", 1800, dpolo::Exp2Scaling},
      {8, "SCRiBLe on the ball", 1200, dpolo::ScribbleChecks},
      {9, "Laplace tail frequency", 60, dpolo::Tail},
      {10, "empirical epsilon", 300, dpolo::EmpiricalEps},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    dpolo::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    const bool in_time = seconds < c.budget_seconds;
    const bool passed = outcome.passed && in_time;
    if (!passed) ++failures;
    std::printf("%s criterion %d (%s): %s [%.1fs, budget %.0fs%s]\n",
                passed ? "PASS" : "FAIL", c.id, c.name, outcome.detail.c_str(),
                seconds, c.budget_seconds, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
