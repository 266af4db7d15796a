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
#ifndef STSREACH_ROBOT_MODEL_HPP_
#define STSREACH_ROBOT_MODEL_HPP_

#include "stsreach/types.hpp"

/// Closed-form dynamics, CoM kinematics and Jacobians of the three-link
/// planar robot (shanks, thighs, torso) used for the sit-to-stand study.
///
/// theta1 is measured from the horizontal; theta2 and theta3 are relative
/// angles. All functions are pure and safe to call concurrently.
namespace stsreach::robot {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Mass moments k0..k3 that depend only on the parameters.
struct MassMoments {
  double k0;  // 1 / total mass
  double k1;  // lc1 m1 + l1 (m2 + m3)
  double k2;  // lc2 m2 + l2 m3
  double k3;  // lc3 m3
};
MassMoments mass_moments(const ParamVector& p);

/// Symmetric positive definite mass matrix M(theta, p).
Eigen::Matrix3d mass_matrix(const JointVector& theta, const ParamVector& p);

/// Coriolis coefficient matrix multiplying the squared absolute link rates.
Eigen::Matrix3d coriolis_coefficients(const JointVector& theta,
                                      const ParamVector& p);

/// Gravity part of F(theta, thetadot, p).
JointVector gravity_term(const JointVector& theta, const ParamVector& p);

/// F(theta, thetadot, p): Coriolis/centrifugal plus gravity contributions.
JointVector coriolis_gravity(const JointVector& theta,
                             const JointVector& thetadot,
                             const ParamVector& p);

/// A_tau(theta, p) mapping u = [tau_h, tau_s, F_x, F_y] to joint torques.
ForceMatrix generalized_force_matrix(const JointVector& theta,
                                     const ParamVector& p);

/// Solves M(theta, p) * qdd = rhs with partial-pivot LU. Throws
/// LinearSolveFailure if the reciprocal condition estimate is below 1e-12.
JointVector solve_mass(const JointVector& theta, const ParamVector& p,
                       const JointVector& rhs);

/// f(x, p, u) = [thetadot; M^-1 (A_tau u - F)].
StateVector forward_dynamics(const StateVector& x, const ParamVector& p,
                             const InputVector& u);

struct DynamicsJacobians {
  StateMatrix A;        // df/dx
  StateParamMatrix B1;  // df/dp
  StateInputMatrix B2;  // df/du
};

/// Central-difference Jacobians of forward_dynamics.
DynamicsJacobians dynamics_jacobians(const StateVector& x,
                                     const ParamVector& p,
                                     const InputVector& u);

/// df/du in closed form: [0; M^-1 A_tau].
StateInputMatrix input_jacobian(const StateVector& x, const ParamVector& p);

/// CoM position and velocity y = zeta(x, p).
OutputVector output_map(const StateVector& x, const ParamVector& p);

/// d zeta / dx, assembled block-wise from the closed-form entries.
OutputStateMatrix output_jacobian_x(const StateVector& x,
                                    const ParamVector& p);

/// d zeta / dp, assembled block-wise; inertia columns are zero.
OutputParamMatrix output_jacobian_p(const StateVector& x,
                                    const ParamVector& p);

/// Planar position of the shoulder (tip of link 3).
Eigen::Vector2d shoulder_position(const JointVector& theta,
                                  const ParamVector& p);

}  // namespace stsreach::robot

#endif  // STSREACH_ROBOT_MODEL_HPP_
