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
#ifndef STSREACH_LQR_DESIGN_HPP_
#define STSREACH_LQR_DESIGN_HPP_

#include <vector>

#include "stsreach/motion_planning.hpp"
#include "stsreach/types.hpp"

/// Finite-horizon LQR about a planned reference: linearization along the
/// reference, backward Riccati integration and the gain schedule.
namespace stsreach::lqr {

/// Quadratic cost weights. Q and S are PSD, R is PD.
struct WeightSet {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::MatrixXd S;

  void validate() const;
  static WeightSet sit_to_stand();
};

/// A(t), B1(t), B2(t) sampled on the reference grid.
struct LinearSchedule {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::MatrixXd> B1;
  std::vector<Eigen::MatrixXd> B2;
};

LinearSchedule linearize_schedule(const planning::ReferenceTrajectory& ref,
                                  const ParamVector& p);

struct RiccatiOptions {
  double blowup_ceiling = 1e12;
  double abs_tolerance = 1e-8;
  double rel_tolerance = 1e-10;
  // Optional extra sampling of the final stretch of the horizon, where P
  // leaves S in a thin boundary layer. count == 0 disables it. Must end at
  // the schedule's tf.
  TimeGrid tail{};
};

struct RiccatiSolution {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> P;
  TimeGrid tail{};
  std::vector<Eigen::MatrixXd> tail_P;
};

/// Integrates dP/dt = -P A - A' P + P B2 R^-1 B2' P - Q backward from
/// P(tf) = S with an error-controlled Dormand-Prince 5(4) stepper; the
/// terminal transient is far too stiff for a fixed step at the schedule
/// spacing. Between samples A and B2 are evaluated by 4-point Lagrange
/// interpolation. P is symmetrized at every sample. Throws BlowUp when the
/// norm of P leaves the ceiling.
RiccatiSolution solve_riccati(const LinearSchedule& schedule,
                              const WeightSet& weights,
                              const RiccatiOptions& options = {});

struct GainSchedule {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> K;
  TimeGrid tail{};  // fine samples of the final stretch, may be empty
  std::vector<Eigen::MatrixXd> tail_K;
};

/// K(t) = R^-1 B2(t)' P(t).
GainSchedule gain_schedule(const RiccatiSolution& riccati,
                           const LinearSchedule& schedule,
                           const Eigen::MatrixXd& R);

/// Cubic Lagrange interpolation of a sampled matrix signal at k + frac.
/// Falls back to linear interpolation on grids with fewer than 4 samples.
Eigen::MatrixXd interpolate_samples(const std::vector<Eigen::MatrixXd>& s,
                                    int k, double frac);

}  // namespace stsreach::lqr

#endif  // STSREACH_LQR_DESIGN_HPP_
