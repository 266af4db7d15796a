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
#include "stsreach/control_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stsreach/errors.hpp"
#include "stsreach/robot_model.hpp"

namespace stsreach::allocation {

void AllocationSpec::validate() const {
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(weights);
  if (!weights.allFinite() || !lu.isInvertible()) {
    throw ValidationError("allocation weight matrix must be nonsingular");
  }
  for (int i = 0; i < kInputDim; ++i) {
    if (lower[i] && upper[i] && *lower[i] > *upper[i]) {
      throw ValidationError("allocation bound " + std::to_string(i) +
                            ": lower exceeds upper");
    }
  }
}

AllocationSpec AllocationSpec::sit_to_stand() {
  AllocationSpec spec;
  spec.weights = Eigen::Vector4d(1.0, 1.0, 10.0, 1.0).asDiagonal();
  spec.lower[3] = 0.0;
  return spec;
}

double allocation_cost(const InputVector& xi, const AllocationSpec& spec) {
  return 0.5 * (spec.weights * xi).squaredNorm();
}

InputVector allocate(const ForceMatrix& A, const Eigen::Vector3d& b,
                     const AllocationSpec& spec) {
  const Eigen::FullPivLU<ForceMatrix> lu(A);
  if (lu.rank() != 3) {
    throw Error("generalized force matrix is rank deficient");
  }
  // Least-norm point on the feasible line and the line direction.
  const Eigen::Matrix3d gram = A * A.transpose();
  const InputVector base = A.transpose() * gram.ldlt().solve(b);
  InputVector dir = lu.kernel().col(0);
  dir.normalize();

  const InputVector w_dir = spec.weights * dir;
  const InputVector w_base = spec.weights * base;
  double s = -w_dir.dot(w_base) / w_dir.squaredNorm();

  double s_lo = -std::numeric_limits<double>::infinity();
  double s_hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kInputDim; ++k) {
    const auto& lo = spec.lower[k];
    const auto& hi = spec.upper[k];
    if (!lo && !hi) continue;
    if (std::abs(dir[k]) < 1e-14) {
      if ((lo && base[k] < *lo) || (hi && base[k] > *hi)) {
        throw Infeasible("input " + std::to_string(k) +
                         " is pinned outside its bounds");
      }
      continue;
    }
    double a = lo ? (*lo - base[k]) / dir[k]
                  : -std::copysign(std::numeric_limits<double>::infinity(),
                                   dir[k]);
    double c = hi ? (*hi - base[k]) / dir[k]
                  : std::copysign(std::numeric_limits<double>::infinity(),
                                  dir[k]);
    if (a > c) std::swap(a, c);
    s_lo = std::max(s_lo, a);
    s_hi = std::min(s_hi, c);
  }
  if (s_lo > s_hi) {
    throw Infeasible("no input inside the box meets the torque equalities");
  }
  s = std::clamp(s, s_lo, s_hi);

  InputVector xi = base + s * dir;
  for (int k = 0; k < kInputDim; ++k) {
    if (spec.lower[k]) xi[k] = std::max(xi[k], *spec.lower[k]);
    if (spec.upper[k]) xi[k] = std::min(xi[k], *spec.upper[k]);
  }
  return xi;
}

InputVector allocate(const JointVector& theta, const JointVector& thetadot,
                     const JointVector& thetaddot, const ParamVector& p,
                     const AllocationSpec& spec) {
  const Eigen::Vector3d b = robot::mass_matrix(theta, p) * thetaddot +
                            robot::coriolis_gravity(theta, thetadot, p);
  return allocate(robot::generalized_force_matrix(theta, p), b, spec);
}

}  // namespace stsreach::allocation
