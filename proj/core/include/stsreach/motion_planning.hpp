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
#ifndef STSREACH_MOTION_PLANNING_HPP_
#define STSREACH_MOTION_PLANNING_HPP_

#include <vector>

#include "stsreach/control_allocation.hpp"
#include "stsreach/types.hpp"

namespace stsreach::planning {

/// z = [theta2 (rad); x_com (m); y_com (m)].
using ZVector = Eigen::Vector3d;

struct Blend {
  double value;
  double rate;
  double accel;
};

/// Rest-to-rest cubic -2 t^3/tf^3 + 3 t^2/tf^2 and its derivatives.
/// Throws DomainError when t lies outside [0, tf].
Blend blend(double t, double tf);

struct ZBoundary {
  ZVector initial;
  ZVector final;
};

struct ZSample {
  ZVector z;
  ZVector zdot;
  ZVector zddot;
};

/// Planned z at time t, where t is measured from the start of the motion.
ZSample reference_z(double t, double tf, const ZBoundary& boundary);

struct JointSample {
  JointVector theta;
  JointVector thetadot;
  JointVector thetaddot;
};

/// Inverts z -> theta with theta2 = z(0) and a Newton solve for
/// (theta1, theta3) on the CoM position equations, starting at guess.
/// Rates and accelerations follow from the CoM velocity relations.
/// Throws SingularConfiguration or NoConvergence.
JointSample z_to_theta(const ZSample& z, const ParamVector& p,
                       const JointVector& guess);

struct PlanningProblem {
  TimeGrid grid;
  StateVector x0;  // seeds the Newton continuation at the first sample
  ZBoundary boundary;
  ParamVector params;
  allocation::AllocationSpec allocation;
};

/// Reference state, acceleration, z and input sampled on a grid.
struct ReferenceTrajectory {
  TimeGrid grid;
  std::vector<StateVector> state;
  std::vector<JointVector> accel;
  std::vector<ZSample> z;
  std::vector<InputVector> input;
};

/// Plans the ascending motion on the grid. Errors are rethrown as
/// PlanningError tagged with the failing sample time.
ReferenceTrajectory build_reference(const PlanningProblem& problem);

/// z of a joint configuration: [theta2; CoM position].
ZVector z_of(const JointVector& theta, const ParamVector& p);

}  // namespace stsreach::planning

#endif  // STSREACH_MOTION_PLANNING_HPP_
