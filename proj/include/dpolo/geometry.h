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

// Decision sets of the online linear optimization game, their linear and
// regularized argmin oracles, and the norm constants of each loss model.

#ifndef DPOLO_GEOMETRY_H_
#define DPOLO_GEOMETRY_H_

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dpolo {

using Vector = Eigen::VectorXd;

// Absolute tolerance used by every membership test.
inline constexpr double kMembershipTolerance = 1e-9;

enum class SetKind { kSimplex, kBall, kCube, kBarrierBall };

std::string_view ToString(SetKind kind);

class DecisionSet {
 public:
  DecisionSet(SetKind kind, int dim);

  static DecisionSet Simplex(int dim) { return {SetKind::kSimplex, dim}; }
  static DecisionSet Ball(int dim) { return {SetKind::kBall, dim}; }
  static DecisionSet Cube(int dim) { return {SetKind::kCube, dim}; }
  static DecisionSet BarrierBall(int dim) {
    return {SetKind::kBarrierBall, dim};
  }

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool Contains(const Vector& x, double tol = kMembershipTolerance) const;

  // A canonical feasible point: the barycenter of the simplex, the origin
  // otherwise.
  Vector Center() const;

 private:
  SetKind kind_;
  int dim_;
};

enum class RegularizerKind { kNegativeEntropy, kSquaredL2 };

class Regularizer {
 public:
  explicit Regularizer(RegularizerKind kind) : kind_(kind) {}

  static Regularizer NegativeEntropy() {
    return Regularizer(RegularizerKind::kNegativeEntropy);
  }
  static Regularizer SquaredL2() {
    return Regularizer(RegularizerKind::kSquaredL2);
  }

  RegularizerKind kind() const { return kind_; }

  // R(x). Entropy uses the convention 0 log 0 = 0.
  double Value(const Vector& x) const;

  // D_R = max R - min R over the set.
  double Range(const DecisionSet& set) const;

 private:
  RegularizerKind kind_;
};

// Loss models of the three full-information instantiations. Each fixes the
// loss set Y: experts ||l||_inf <= 1, sphere ||l||_2 <= 1, cube ||l||_1 <= 1.
enum class LossModel { kExperts, kSphere, kCube };

std::string_view ToString(LossModel model);

struct SetBounds {
  double x_norm_2 = 0.0;
  double x_norm_inf = 0.0;
  double y_norm_1 = 0.0;
  double y_norm_2 = 0.0;
  double y_norm_inf = 0.0;
  double m_bound = 0.0;

  // M <= ||Y||_p ||X||_q for the conjugate pairs representable here.
  bool HolderConsistent() const;
};

// Returns a minimizer of <v, x> over the set. Ties go to the lowest index on
// the simplex; cube coordinates with v_i == 0 map to 0; v == 0 on the ball
// returns the origin.
Vector LinearArgmin(const DecisionSet& set, const Vector& v);

// Closed-form minimizer of eta <v, x> + R(x). Supported pairs are
// (Simplex, NegativeEntropy), (Ball, SquaredL2) and (Cube, SquaredL2).
Vector RegularizedArgmin(const DecisionSet& set, const Regularizer& reg,
                         const Vector& v, double eta);

SetBounds ComputeSetBounds(const DecisionSet& set, LossModel model);

// The decision set a loss model is played over.
SetKind NaturalSet(LossModel model);

// ||l||_p for the norm that defines the model's loss set.
double LossSetNorm(LossModel model, const Vector& loss);

}  // namespace dpolo

#endif  // DPOLO_GEOMETRY_H_
