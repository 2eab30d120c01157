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

#include "dpolo/bandit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpolo/errors.h"

namespace dpolo {

Exp2Params Exp2Params::ForPrivateMab(int arms, std::int64_t horizon,
                                     double lambda) {
  if (arms < 1 || horizon < 1) {
    throw ParameterError("EXP2 needs at least one arm and one round");
  }
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be nonnegative");
  const double n = arms;
  const double t = static_cast<double>(horizon);
  const double inflation = 1.0 + 2.0 * lambda * lambda * std::log(n * t);
  Exp2Params params;
  params.eta = std::sqrt(std::log(n) / (2.0 * n * t * inflation));
  params.gamma = std::min(1.0, params.eta * n * std::sqrt(inflation));
  if (arms == 1) params.eta = 1.0;  // ln 1 = 0; the single arm is forced.
  return params;
}

Exp2::Exp2(int arms, Exp2Params params)
    : arms_(arms),
      params_(std::move(params)),
      log_w_(Vector::Zero(arms)),
      q_(Vector::Constant(arms, 1.0 / arms)),
      played_(Vector::Zero(arms)) {
  if (arms < 1) throw ParameterError("EXP2 needs at least one arm");
  if (!(params_.eta > 0.0) || !std::isfinite(params_.eta)) {
    throw ParameterError("EXP2 eta must be a positive finite real");
  }
  if (!(params_.gamma >= 0.0 && params_.gamma <= 1.0)) {
    throw ParameterError("EXP2 gamma must lie in [0, 1]");
  }
  if (params_.mu.size() == 0) {
    mu_ = Vector::Constant(arms, 1.0 / arms);
  } else {
    if (params_.mu.size() != arms || params_.mu.minCoeff() < 0.0 ||
        std::abs(params_.mu.sum() - 1.0) > 1e-12) {
      throw ParameterError("exploration distribution must be a probability "
                           "vector over the arms");
    }
    mu_ = params_.mu;
  }
  p_ = p();
}

Vector Exp2::Estimator(const Vector& p, int arm, double feedback) {
  if (arm < 0 || arm >= p.size()) throw ContractError("arm out of range");
  if (!(p[arm] > 0.0)) {
    throw NumericalError("played arm has zero probability");
  }
  Vector estimate = Vector::Zero(p.size());
  estimate[arm] = feedback / p[arm];
  return estimate;
}

const Vector& Exp2::Play(SeededRng& rng) {
  if (awaiting_feedback_) {
    throw ProtocolError("EXP2 is waiting for feedback on its last arm");
  }
  p_ = p();
  const double u = rng.UniformOpen01();
  double acc = 0.0;
  arm_ = arms_ - 1;
  for (int i = 0; i < arms_; ++i) {
    acc += p_[i];
    if (u < acc) {
      arm_ = i;
      break;
    }
  }
  // Guards the rounding tail of the cumulative sum.
  while (p_[arm_] <= 0.0 && arm_ > 0) --arm_;
  played_.setZero();
  played_[arm_] = 1.0;
  awaiting_feedback_ = true;
  return played_;
}

void Exp2::Update(double feedback, SeededRng& /*rng*/) {
  if (!awaiting_feedback_) {
    throw ProtocolError("EXP2 received feedback before playing");
  }
  if (!std::isfinite(feedback)) throw InputError("feedback is not finite");
  const double estimate = Estimator(p_, arm_, feedback)[arm_];
  log_w_[arm_] -= params_.eta * estimate;
  // Renormalize in the log domain: q = softmax(log_w).
  log_w_.array() -= log_w_.maxCoeff();
  q_ = log_w_.array().exp();
  q_ /= q_.sum();
  awaiting_feedback_ = false;
}

int Exp2::Step(double feedback, SeededRng& rng) {
  Update(feedback, rng);
  Play(rng);
  return arm_;
}

double Exp2ConditionRatio(const Exp2Params& params, double lambda, int arms,
                          std::int64_t horizon) {
  const double log_nt = std::log(static_cast<double>(arms) * horizon);
  const double lhs = params.eta * arms * (1.0 + 4.0 * lambda * log_nt);
  if (params.gamma == 0.0) {
    return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return lhs / params.gamma;
}

bool Exp2ConditionCheck(const Exp2Params& params, double lambda, int arms,
                        std::int64_t horizon) {
  return Exp2ConditionRatio(params, lambda, arms, horizon) <= 1.0;
}

namespace ball_barrier {
namespace {

double Slack(const Vector& x) {
  const double s = 1.0 - x.squaredNorm();
  if (!(s > 0.0)) throw ContractError("point is not interior to the ball");
  return s;
}

}  // namespace

double Value(const Vector& x) { return -std::log(Slack(x)); }

Vector Gradient(const Vector& x) { return 2.0 * x / Slack(x); }

Eigen::MatrixXd Hessian(const Vector& x) {
  const double s = Slack(x);
  Eigen::MatrixXd h = (2.0 / s) * Eigen::MatrixXd::Identity(x.size(), x.size());
  h.noalias() += (4.0 / (s * s)) * x * x.transpose();
  return h;
}

NewtonResult MinimizeLinearPlusBarrier(const Vector& g, double eta,
                                       const Vector& start,
                                       int max_iterations) {
  NewtonResult result{start, 0, 0.0};
  Slack(start);
  const Vector linear = eta * g;
  const double tol = 1e-10 * std::max(1.0, linear.norm());
  for (int it = 0; it <= max_iterations; ++it) {
    const Vector grad = linear + Gradient(result.x);
    result.gradient_norm = grad.norm();
    result.iterations = it;
    if (result.gradient_norm < tol) return result;
    if (it == max_iterations) break;
    const Eigen::LLT<Eigen::MatrixXd> llt(Hessian(result.x));
    const Vector step = llt.solve(grad);
    const double decrement = std::sqrt(std::max(0.0, grad.dot(step)));
    // Converged to machine precision even if the absolute test is not met.
    if (decrement < 1e-15) return result;
    // Damped steps stay inside the Dikin ellipsoid, hence inside the ball.
    const double damping = decrement < 0.25 ? 1.0 : 1.0 / (1.0 + decrement);
    Vector next = result.x - damping * step;
    double shrink = 1.0;
    while (next.squaredNorm() >= 1.0 && shrink > 1e-12) {
      shrink *= 0.5;
      next = result.x - shrink * damping * step;
    }
    result.x = next;
  }
  throw NumericalError("barrier Newton solve did not converge in " +
                       std::to_string(max_iterations) +
                       " iterations (gradient norm " +
                       std::to_string(result.gradient_norm) + ")");
}

}  // namespace ball_barrier

ScribbleParams ScribbleParams::ForPrivateBall(int dim, std::int64_t horizon,
                                              double m_bound, double lambda,
                                              double x_norm_2) {
  if (dim < 1 || horizon < 2) {
    throw ParameterError("SCRiBLe needs dim >= 1 and horizon >= 2");
  }
  const double n = dim;
  const double t = static_cast<double>(horizon);
  ScribbleParams params;
  params.eta = std::sqrt(
      params.nu * std::log(t) /
      (2.0 * n * n * t *
       (m_bound * m_bound + lambda * lambda * n * x_norm_2 * x_norm_2)));
  return params;
}

Scribble::Scribble(int dim, ScribbleParams params)
    : dim_(dim),
      params_(params),
      x_(Vector::Zero(dim)),
      g_(Vector::Zero(dim)),
      played_(Vector::Zero(dim)),
      direction_(Vector::Zero(dim)) {
  if (dim < 1) throw ParameterError("SCRiBLe needs dim >= 1");
  if (!(params_.eta > 0.0) || !std::isfinite(params_.eta)) {
    throw ParameterError("SCRiBLe eta must be a positive finite real");
  }
}

Vector Scribble::Estimator(int dim, double feedback, double xi,
                           double eigenvalue, const Vector& eigenvector) {
  return dim * feedback * xi * std::sqrt(eigenvalue) * eigenvector;
}

const Vector& Scribble::Play(SeededRng& rng) {
  if (awaiting_feedback_) {
    throw ProtocolError("SCRiBLe is waiting for feedback on its last point");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      ball_barrier::Hessian(x_));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("barrier Hessian eigendecomposition failed");
  }
  const int i = rng.UniformIndex(dim_);
  xi_ = (rng.NextU64() >> 63) != 0 ? 1.0 : -1.0;
  eigenvalue_ = eig.eigenvalues()[i];
  direction_ = eig.eigenvectors().col(i);
  played_ = x_ + (xi_ / std::sqrt(eigenvalue_)) * direction_;
  awaiting_feedback_ = true;
  return played_;
}

void Scribble::Update(double feedback, SeededRng& /*rng*/) {
  if (!awaiting_feedback_) {
    throw ProtocolError("SCRiBLe received feedback before playing");
  }
  if (!std::isfinite(feedback)) throw InputError("feedback is not finite");
  g_ += Estimator(dim_, feedback, xi_, eigenvalue_, direction_);
  const ball_barrier::NewtonResult solved =
      ball_barrier::MinimizeLinearPlusBarrier(g_, params_.eta, x_);
  x_ = solved.x;
  newton_iterations_ = solved.iterations;
  awaiting_feedback_ = false;
}

double ReductionLambdaFor(double sensitivity_bound, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(sensitivity_bound > 0.0)) {
    throw ParameterError("sensitivity bound must be positive");
  }
  return sensitivity_bound / epsilon;
}

PrivatizedBandit::PrivatizedBandit(std::unique_ptr<BanditLearner> inner,
                                   NoiseSpec noise, double sensitivity_bound,
                                   double value_bound)
    : inner_(std::move(inner)),
      noise_(noise),
      sensitivity_bound_(sensitivity_bound),
      value_bound_(value_bound),
      last_noise_(Vector::Zero(noise.dim())) {
  if (!inner_) throw ContractError("reduction needs an inner learner");
  if (inner_->dim() != noise.dim()) {
    throw ContractError("noise dimension does not match the inner learner");
  }
}

const Vector& PrivatizedBandit::Start(SeededRng& rng) {
  if (current_ != nullptr) throw ProtocolError("reduction already started");
  current_ = &inner_->Play(rng);
  return *current_;
}

void PrivatizedBandit::Forward(double true_loss_value, SeededRng& rng) {
  if (current_ == nullptr) throw ProtocolError("reduction not started");
  if (!std::isfinite(true_loss_value)) {
    throw InputError("loss value is not finite");
  }
  constexpr double kTol = 1e-9;
  if (std::abs(true_loss_value) > value_bound_ + kTol) {
    throw PrivacyContractError("loss value " + std::to_string(true_loss_value) +
                               " exceeds the bound M = " +
                               std::to_string(value_bound_));
  }
  const double inf_norm = current_->lpNorm<Eigen::Infinity>();
  const double sensitivity =
      inf_norm > 0.0 ? std::abs(true_loss_value) / inf_norm
                     : std::abs(true_loss_value) > 0.0
                           ? std::numeric_limits<double>::infinity()
                           : 0.0;
  if (sensitivity > sensitivity_bound_ + kTol) {
    throw PrivacyContractError("|<l, x>| / ||x||_inf = " +
                               std::to_string(sensitivity) +
                               " exceeds the sensitivity bound B = " +
                               std::to_string(sensitivity_bound_));
  }
  last_noise_ = Sample(noise_, rng);
  if (bias_) last_noise_ += *bias_;
  last_forwarded_ = true_loss_value + last_noise_.dot(*current_);
  inner_->Update(last_forwarded_, rng);
}

const Vector& PrivatizedBandit::Step(double true_loss_value, SeededRng& rng) {
  Forward(true_loss_value, rng);
  current_ = &inner_->Play(rng);
  return *current_;
}

void PrivatizedBandit::Finish(double true_loss_value, SeededRng& rng) {
  Forward(true_loss_value, rng);
}

}  // namespace dpolo
