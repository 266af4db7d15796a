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
#include "stsreach/motion_planning.hpp"

#include <cmath>
#include <string>

#include "stsreach/errors.hpp"
#include "stsreach/robot_model.hpp"

namespace stsreach::planning {
namespace {

constexpr double kNewtonTolerance = 1e-12;
constexpr int kNewtonMaxIterations = 50;

// CoM position rows of the output Jacobian, split into the theta2 column
// and the (theta1, theta3) block solved for.
struct PositionJacobian {
  Eigen::Matrix2d free;
  Eigen::Vector2d theta2_col;
};

PositionJacobian position_jacobian(const JointVector& theta,
                                   const ParamVector& p) {
  const Eigen::Matrix<double, 2, 3> j =
      robot::output_jacobian_x(make_state(theta, JointVector::Zero()), p)
          .block<2, 3>(0, 0);
  PositionJacobian out;
  out.free << j(0, 0), j(0, 2), j(1, 0), j(1, 2);
  out.theta2_col = j.col(1);
  return out;
}

Eigen::PartialPivLU<Eigen::Matrix2d> checked_lu(const Eigen::Matrix2d& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || std::abs(m.determinant()) < 1e-12 * scale * scale) {
    throw SingularConfiguration(
        "CoM position Jacobian w.r.t. (theta1, theta3) is singular");
  }
  return Eigen::PartialPivLU<Eigen::Matrix2d>(m);
}

}  // namespace

Blend blend(double t, double tf) {
  if (!(tf > 0.0)) throw DomainError("blend horizon must be positive");
  if (!(t >= 0.0 && t <= tf)) {
    throw DomainError("blend time " + std::to_string(t) + " outside [0, " +
                      std::to_string(tf) + "]");
  }
  const double s = t / tf;
  return Blend{s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s) / tf,
               (6.0 - 12.0 * s) / (tf * tf)};
}

ZSample reference_z(double t, double tf, const ZBoundary& boundary) {
  const Blend b = blend(t, tf);
  const ZVector delta = boundary.final - boundary.initial;
  return ZSample{boundary.initial + delta * b.value, delta * b.rate,
                 delta * b.accel};
}

ZVector z_of(const JointVector& theta, const ParamVector& p) {
  const OutputVector y =
      robot::output_map(make_state(theta, JointVector::Zero()), p);
  return ZVector(theta[1], y[0], y[1]);
}

JointSample z_to_theta(const ZSample& zs, const ParamVector& p,
                       const JointVector& guess) {
  JointVector theta = guess;
  theta[1] = zs.z[0];
  const Eigen::Vector2d target = zs.z.tail<2>();

  bool converged = false;
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    const Eigen::Vector2d residual =
        z_of(theta, p).tail<2>() - target;
    if (residual.lpNorm<Eigen::Infinity>() <= kNewtonTolerance) {
      converged = true;
      break;
    }
    const auto lu = checked_lu(position_jacobian(theta, p).free);
    const Eigen::Vector2d step = lu.solve(residual);
    theta[0] -= step[0];
    theta[2] -= step[1];
    if (!theta.allFinite()) break;
  }
  if (!converged) {
    throw NoConvergence("inverse kinematics Newton iteration did not converge");
  }

  // [vx; vy] = J_free [w1; w3] + J_theta2 w2.
  const PositionJacobian jac = position_jacobian(theta, p);
  const auto lu = checked_lu(jac.free);
  JointSample out;
  out.theta = theta;
  const Eigen::Vector2d w13 =
      lu.solve(zs.zdot.tail<2>() - jac.theta2_col * zs.zdot[0]);
  out.thetadot = JointVector(w13[0], zs.zdot[0], w13[1]);

  // Differentiating once more adds the velocity-row Jacobian times thetadot.
  const OutputStateMatrix full =
      robot::output_jacobian_x(make_state(theta, out.thetadot), p);
  const Eigen::Vector2d drift = full.block<2, 3>(2, 0) * out.thetadot;
  const Eigen::Vector2d a13 =
      lu.solve(zs.zddot.tail<2>() - jac.theta2_col * zs.zddot[0] - drift);
  out.thetaddot = JointVector(a13[0], zs.zddot[0], a13[1]);
  return out;
}

ReferenceTrajectory build_reference(const PlanningProblem& problem) {
  const TimeGrid& grid = problem.grid;
  ReferenceTrajectory ref;
  ref.grid = grid;
  ref.state.reserve(grid.count);
  ref.accel.reserve(grid.count);
  ref.z.reserve(grid.count);
  ref.input.reserve(grid.count);

  const double horizon = grid.tf() - grid.t0;
  JointVector guess = angles(problem.x0);
  for (int k = 0; k < grid.count; ++k) {
    const double t = grid.time(k);
    try {
      // Pin the end sample to the horizon so rounding never leaves [0, tf].
      const double local = k + 1 == grid.count ? horizon : t - grid.t0;
      const ZSample zs = reference_z(local, horizon, problem.boundary);
      const JointSample js = z_to_theta(zs, problem.params, guess);
      guess = js.theta;
      ref.state.push_back(make_state(js.theta, js.thetadot));
      ref.accel.push_back(js.thetaddot);
      ref.z.push_back(zs);
      ref.input.push_back(allocation::allocate(js.theta, js.thetadot,
                                               js.thetaddot, problem.params,
                                               problem.allocation));
    } catch (const Error& e) {
      throw PlanningError(t, e.what());
    }
  }
  return ref;
}

}  // namespace stsreach::planning
