// Copyright 2026 The StsReach Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef STSREACH_CONTROL_ALLOCATION_HPP_
#define STSREACH_CONTROL_ALLOCATION_HPP_

#include <array>
#include <optional>

#include "stsreach/types.hpp"

namespace stsreach::allocation {

/// Weights and box of the per-sample least-squares allocation problem.
/// An absent bound means the coordinate is unconstrained on that side.
struct AllocationSpec {
  Eigen::Matrix4d weights = Eigen::Matrix4d::Identity();
  std::array<std::optional<double>, kInputDim> lower{};
  std::array<std::optional<double>, kInputDim> upper{};

  /// Throws ValidationError on a singular weight matrix or crossed bounds.
  void validate() const;

  /// Sit-to-stand defaults: W_u = diag(1, 1, 10, 1) and F_y >= 0.
  static AllocationSpec sit_to_stand();
};

/// Minimizes 0.5 * |W xi|^2 subject to A xi = b and the box of spec.
///
/// The three equalities leave a one-dimensional feasible line in R^4, so the
/// problem is solved on its null-space parameterization and the scalar
/// minimizer is clipped to the box. Throws Infeasible when the line misses
/// the box and Error when A is rank deficient.
InputVector allocate(const ForceMatrix& A, const Eigen::Vector3d& b,
                     const AllocationSpec& spec);

/// Computed-torque allocation: A = A_tau(theta, p), b = M thetaddot + F.
InputVector allocate(const JointVector& theta, const JointVector& thetadot,
                     const JointVector& thetaddot, const ParamVector& p,
                     const AllocationSpec& spec);

/// Objective value 0.5 * |W xi|^2.
double allocation_cost(const InputVector& xi, const AllocationSpec& spec);

}  // namespace stsreach::allocation

#endif  // STSREACH_CONTROL_ALLOCATION_HPP_
