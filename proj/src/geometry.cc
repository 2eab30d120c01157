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

#include "dpolo/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpolo/errors.h"

namespace dpolo {
namespace {

void CheckDim(const DecisionSet& set, const Vector& v) {
  if (v.size() != set.dim()) {
    throw ContractError("dimension mismatch: set has dim " +
                        std::to_string(set.dim()) + ", vector has " +
                        std::to_string(v.size()));
  }
}

void CheckFinite(const Vector& v) {
  if (!v.allFinite()) throw InputError("vector has non-finite entries");
}

bool IsBallLike(SetKind kind) {
  return kind == SetKind::kBall || kind == SetKind::kBarrierBall;
}

}  // namespace

std::string_view ToString(SetKind kind) {
  switch (kind) {
    case SetKind::kSimplex:
      return "simplex";
    case SetKind::kBall:
      return "ball";
    case SetKind::kCube:
      return "cube";
    case SetKind::kBarrierBall:
      return "barrier_ball";
  }
  return "unknown";
}

std::string_view ToString(LossModel model) {
  switch (model) {
    case LossModel::kExperts:
      return "experts";
    case LossModel::kSphere:
      return "sphere";
    case LossModel::kCube:
      return "cube";
  }
  return "unknown";
}

DecisionSet::DecisionSet(SetKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 1) throw ContractError("decision set dimension must be >= 1");
}

bool DecisionSet::Contains(const Vector& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case SetKind::kSimplex:
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
    case SetKind::kBall:
    case SetKind::kBarrierBall:
      return x.norm() <= 1.0 + tol;
    case SetKind::kCube:
      return x.lpNorm<Eigen::Infinity>() <= 1.0 + tol;
  }
  return false;
}

Vector DecisionSet::Center() const {
  if (kind_ == SetKind::kSimplex) {
    return Vector::Constant(dim_, 1.0 / dim_);
  }
  return Vector::Zero(dim_);
}

double Regularizer::Value(const Vector& x) const {
  if (kind_ == RegularizerKind::kSquaredL2) return x.squaredNorm();
  double r = 0.0;
  for (double xi : x) {
    if (xi > 0.0) r += xi * std::log(xi);
  }
  return r;
}

double Regularizer::Range(const DecisionSet& set) const {
  if (kind_ == RegularizerKind::kNegativeEntropy) {
    if (set.kind() != SetKind::kSimplex) {
      throw UnsupportedError("negative entropy is defined on the simplex only");
    }
    return std::log(static_cast<double>(set.dim()));
  }
  switch (set.kind()) {
    case SetKind::kSimplex:
      return 1.0 - 1.0 / set.dim();
    case SetKind::kBall:
    case SetKind::kBarrierBall:
      return 1.0;
    case SetKind::kCube:
      return static_cast<double>(set.dim());
  }
  return 0.0;
}

bool SetBounds::HolderConsistent() const {
  constexpr double kSlack = 1e-12;
  return m_bound <= y_norm_1 * x_norm_inf + kSlack &&
         m_bound <= y_norm_2 * x_norm_2 + kSlack;
}

Vector LinearArgmin(const DecisionSet& set, const Vector& v) {
  CheckDim(set, v);
  CheckFinite(v);
  const int n = set.dim();
  switch (set.kind()) {
    case SetKind::kSimplex: {
      // Eigen's minCoeff returns the first minimal index.
      Eigen::Index best = 0;
      v.minCoeff(&best);
      Vector x = Vector::Zero(n);
      x[best] = 1.0;
      return x;
    }
    case SetKind::kBall:
    case SetKind::kBarrierBall: {
      const double norm = v.norm();
      if (norm == 0.0) return Vector::Zero(n);
      return -v / norm;
    }
    case SetKind::kCube: {
      Vector x(n);
      for (int i = 0; i < n; ++i) {
        x[i] = v[i] > 0.0 ? -1.0 : (v[i] < 0.0 ? 1.0 : 0.0);
      }
      return x;
    }
  }
  return Vector::Zero(n);
}

Vector RegularizedArgmin(const DecisionSet& set, const Regularizer& reg,
                         const Vector& v, double eta) {
  CheckDim(set, v);
  CheckFinite(v);
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ContractError("eta must be a positive finite real");
  }
  const bool entropy = reg.kind() == RegularizerKind::kNegativeEntropy;
  if (set.kind() == SetKind::kSimplex && entropy) {
    // Softmax of -eta v. Subtracting the maximum exponent rescales numerator
    // and denominator by the same factor, so the result is exact.
    Vector a = -eta * v;
    a.array() -= a.maxCoeff();
    Vector x = a.array().exp();
    return x / x.sum();
  }
  if (IsBallLike(set.kind()) && !entropy) {
    Vector u = -0.5 * eta * v;
    const double norm = u.norm();
    if (norm > 1.0) u /= norm;
    return u;
  }
  if (set.kind() == SetKind::kCube && !entropy) {
    return (-0.5 * eta * v).cwiseMax(-1.0).cwiseMin(1.0);
  }
  throw UnsupportedError(std::string("no closed-form regularized argmin for (") +
                         std::string(ToString(set.kind())) + ", " +
                         (entropy ? "negative_entropy" : "squared_l2") + ")");
}

SetKind NaturalSet(LossModel model) {
  switch (model) {
    case LossModel::kExperts:
      return SetKind::kSimplex;
    case LossModel::kSphere:
      return SetKind::kBall;
    case LossModel::kCube:
      return SetKind::kCube;
  }
  return SetKind::kSimplex;
}

SetBounds ComputeSetBounds(const DecisionSet& set, LossModel model) {
  const double n = set.dim();
  const bool ball_like = IsBallLike(set.kind());
  SetBounds b;
  if (model == LossModel::kExperts && set.kind() == SetKind::kSimplex) {
    b.x_norm_2 = 1.0;
    b.x_norm_inf = 1.0;
    b.y_norm_inf = 1.0;
    b.y_norm_2 = std::sqrt(n);
    b.y_norm_1 = n;
    b.m_bound = 1.0;
  } else if (model == LossModel::kSphere && ball_like) {
    b.x_norm_2 = 1.0;
    b.x_norm_inf = 1.0;
    b.y_norm_inf = 1.0;
    b.y_norm_2 = 1.0;
    b.y_norm_1 = std::sqrt(n);
    b.m_bound = 1.0;
  } else if (model == LossModel::kCube && set.kind() == SetKind::kCube) {
    b.x_norm_2 = std::sqrt(n);
    b.x_norm_inf = 1.0;
    b.y_norm_inf = 1.0;
    b.y_norm_2 = 1.0;
    b.y_norm_1 = 1.0;
    b.m_bound = 1.0;
  } else {
    throw UnsupportedError(std::string("unrecognized (set, loss model) pair (") +
                           std::string(ToString(set.kind())) + ", " +
                           std::string(ToString(model)) + ")");
  }
  return b;
}

double LossSetNorm(LossModel model, const Vector& loss) {
  switch (model) {
    case LossModel::kExperts:
      return loss.lpNorm<Eigen::Infinity>();
    case LossModel::kSphere:
      return loss.norm();
    case LossModel::kCube:
      return loss.lpNorm<1>();
  }
  return 0.0;
}

}  // namespace dpolo
