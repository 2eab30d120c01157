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

// Bandit-feedback learners and the reduction that privatizes them: the
// wrapped learner only ever sees <l_t, x_t> + <Z_t, x_t> with fresh Laplace
// noise Z_t each round.

#ifndef DPOLO_BANDIT_H_
#define DPOLO_BANDIT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "dpolo/geometry.h"
#include "dpolo/noise.h"

namespace dpolo {

// A learner that observes only the scalar loss of the point it played.
// Play and Update must alternate, starting with Play.
class BanditLearner {
 public:
  virtual ~BanditLearner() = default;

  virtual int dim() const = 0;
  virtual const Vector& Play(SeededRng& rng) = 0;
  virtual void Update(double feedback, SeededRng& rng) = 0;
};

struct Exp2Params {
  double eta = 0.1;
  double gamma = 0.0;
  // Exploration distribution; empty means uniform.
  Vector mu;

  // eta = sqrt(ln N / (2 N T (1 + 2 lambda^2 ln NT))),
  // gamma = eta N sqrt(1 + 2 lambda^2 ln NT) (capped at 1), mu uniform.
  // lambda = 0 yields the non-private tuning.
  static Exp2Params ForPrivateMab(int arms, std::int64_t horizon,
                                  double lambda);
};

// Exponential weights over N arms mixed with an exploration distribution.
class Exp2 final : public BanditLearner {
 public:
  Exp2(int arms, Exp2Params params);

  int dim() const override { return arms_; }
  // Samples i_t ~ p_t and returns e_{i_t}.
  const Vector& Play(SeededRng& rng) override;
  // Importance-weighted estimate of l_t from the feedback of arm i_t
  // followed by the multiplicative update of q.
  void Update(double feedback, SeededRng& rng) override;

  // Update then Play; returns i_{t+1}.
  int Step(double feedback, SeededRng& rng);

  int arm() const { return arm_; }
  const Vector& q() const { return q_; }
  // p_t = (1 - gamma) q_t + gamma mu.
  Vector p() const { return (1.0 - params_.gamma) * q_ + params_.gamma * mu_; }
  const Exp2Params& params() const { return params_; }

  // l~ = P^+ e_i e_i^T l: feedback / p(arm) at the played arm, 0 elsewhere.
  static Vector Estimator(const Vector& p, int arm, double feedback);

 private:
  int arms_;
  Exp2Params params_;
  Vector mu_;
  Vector log_w_;
  Vector q_;
  Vector p_;
  Vector played_;
  int arm_ = -1;
  bool awaiting_feedback_ = false;
};

// eta N (1 + 4 lambda ln NT) / gamma: the validity region of the
// exponential-weights regret bound is ratio <= 1.
double Exp2ConditionRatio(const Exp2Params& params, double lambda, int arms,
                          std::int64_t horizon);
bool Exp2ConditionCheck(const Exp2Params& params, double lambda, int arms,
                        std::int64_t horizon);

// Self-concordant barrier R(x) = -log(1 - ||x||^2) of the unit ball (nu = 1).
namespace ball_barrier {

inline constexpr double kNu = 1.0;

double Value(const Vector& x);
Vector Gradient(const Vector& x);
Eigen::MatrixXd Hessian(const Vector& x);

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Minimizes eta <g, y> + R(y) by damped Newton from an interior start. Stops
// once ||grad|| < 1e-10 (scaled by max(1, eta ||g||)); throws NumericalError
// after max_iterations.
NewtonResult MinimizeLinearPlusBarrier(const Vector& g, double eta,
                                       const Vector& start,
                                       int max_iterations = 100);

}  // namespace ball_barrier

struct ScribbleParams {
  double eta = 0.01;
  double nu = ball_barrier::kNu;

  // eta = sqrt(nu ln T / (2 N^2 T (M^2 + lambda^2 N ||X||_2^2))).
  static ScribbleParams ForPrivateBall(int dim, std::int64_t horizon,
                                       double m_bound, double lambda,
                                       double x_norm_2);
};

// Bandit linear optimization over the unit ball via its self-concordant
// barrier. Each round perturbs the iterate to the boundary of its Dikin
// ellipsoid along a random eigendirection of the barrier Hessian.
class Scribble final : public BanditLearner {
 public:
  Scribble(int dim, ScribbleParams params);

  int dim() const override { return dim_; }
  const Vector& Play(SeededRng& rng) override;
  void Update(double feedback, SeededRng& rng) override;

  const Vector& iterate() const { return x_; }
  const Vector& estimator_sum() const { return g_; }
  const ScribbleParams& params() const { return params_; }
  int last_newton_iterations() const { return newton_iterations_; }

  // l^ = N f xi sqrt(eigenvalue) v.
  static Vector Estimator(int dim, double feedback, double xi,
                          double eigenvalue, const Vector& eigenvector);

 private:
  int dim_;
  ScribbleParams params_;
  Vector x_;
  Vector g_;
  Vector played_;
  Vector direction_;
  double eigenvalue_ = 1.0;
  double xi_ = 1.0;
  bool awaiting_feedback_ = false;
  int newton_iterations_ = 0;
};

// lambda = B / epsilon.
double ReductionLambdaFor(double sensitivity_bound, double epsilon);

// Wraps a non-private bandit learner. Each round the wrapper forwards
// <l_t, x_t> + <Z_t, x_t> with Z_t ~ noise drawn fresh.
class PrivatizedBandit {
 public:
  // sensitivity_bound is B >= |<l, x>| / ||x||_inf; value_bound is M >=
  // |<l, x>|. Both are checked every round.
  PrivatizedBandit(std::unique_ptr<BanditLearner> inner, NoiseSpec noise,
                   double sensitivity_bound, double value_bound);

  // The first point x_1.
  const Vector& Start(SeededRng& rng);
  // Consumes <l_t, x_t>, forwards the noisy value and returns x_{t+1}.
  const Vector& Step(double true_loss_value, SeededRng& rng);
  // Consumes the final round's loss without requesting another point.
  void Finish(double true_loss_value, SeededRng& rng);

  const Vector& current_point() const { return *current_; }
  const Vector& last_noise() const { return last_noise_; }
  double last_forwarded() const { return last_forwarded_; }
  BanditLearner& inner() { return *inner_; }
  const NoiseSpec& noise() const { return noise_; }

  // Negative-control hook: adds a constant offset to every Z_t, breaking
  // the zero-mean assumption.
  void set_noise_bias_for_testing(Vector bias) { bias_ = std::move(bias); }

 private:
  void Forward(double true_loss_value, SeededRng& rng);

  std::unique_ptr<BanditLearner> inner_;
  NoiseSpec noise_;
  double sensitivity_bound_;
  double value_bound_;
  const Vector* current_ = nullptr;
  Vector last_noise_;
  std::optional<Vector> bias_;
  double last_forwarded_ = 0.0;
};

}  // namespace dpolo

#endif  // DPOLO_BANDIT_H_
