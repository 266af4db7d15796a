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

#ifndef STSREACH_TYPES_HPP_
#define STSREACH_TYPES_HPP_

#include <cmath>
#include <numbers>
#include <string_view>

#include <Eigen/Dense>

namespace stsreach {

inline constexpr int kNumJoints = 3;
inline constexpr int kStateDim = 6;
inline constexpr int kInputDim = 4;
inline constexpr int kOutputDim = 4;
inline constexpr int kNumParams = 12;

/// Joint-space quantity: angles (rad), rates (rad/s) or accelerations.
using JointVector = Eigen::Vector3d;
/// x = [theta; thetadot], radians and rad/s.
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
/// u = [tau_h (N m); tau_s (N m); F_x (N); F_y (N)].
using InputVector = Eigen::Matrix<double, kInputDim, 1>;
/// y = [x_com (m); y_com (m); vx_com (m/s); vy_com (m/s)].
using OutputVector = Eigen::Matrix<double, kOutputDim, 1>;

using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using StateParamMatrix = Eigen::Matrix<double, kStateDim, kNumParams>;
using StateInputMatrix = Eigen::Matrix<double, kStateDim, kInputDim>;
using GainMatrix = Eigen::Matrix<double, kInputDim, kStateDim>;
using ForceMatrix = Eigen::Matrix<double, kNumJoints, kInputDim>;
using OutputStateMatrix = Eigen::Matrix<double, kOutputDim, kStateDim>;
using OutputParamMatrix = Eigen::Matrix<double, kOutputDim, kNumParams>;

/// Positions of the physical parameters inside a ParamVector.
enum ParamIndex : int {
  kM1 = 0, kM2, kM3,
  kI1, kI2, kI3,
  kL1, kL2, kL3,
  kLc1, kLc2, kLc3,
};

/// Short name and unit of each parameter, indexed by ParamIndex.
inline constexpr std::string_view kParamNames[kNumParams] = {
    "m1", "m2", "m3", "I1", "I2", "I3", "l1", "l2", "l3", "lc1", "lc2", "lc3"};
inline constexpr std::string_view kParamUnits[kNumParams] = {
    "kg", "kg", "kg", "kg_m2", "kg_m2", "kg_m2", "m", "m", "m", "m", "m", "m"};

/// The twelve physical parameters of the three-link model, in the order
/// masses, inertias about the CoM, link lengths, joint-to-CoM distances.
struct ParamVector {
  using Raw = Eigen::Matrix<double, kNumParams, 1>;

  Raw values = Raw::Zero();

  ParamVector() = default;
  explicit ParamVector(const Raw& raw) : values(raw) {}

  double operator[](ParamIndex i) const { return values[i]; }
  double& operator[](ParamIndex i) { return values[i]; }

  double m1() const { return values[kM1]; }
  double m2() const { return values[kM2]; }
  double m3() const { return values[kM3]; }
  double I1() const { return values[kI1]; }
  double I2() const { return values[kI2]; }
  double I3() const { return values[kI3]; }
  double l1() const { return values[kL1]; }
  double l2() const { return values[kL2]; }
  double l3() const { return values[kL3]; }
  double lc1() const { return values[kLc1]; }
  double lc2() const { return values[kLc2]; }
  double lc3() const { return values[kLc3]; }

  /// Throws ValidationError unless every entry is positive and finite and
  /// each CoM offset lies within its link.
  void validate() const;

  /// Nominal parameters of the sit-to-stand scenario.
  static ParamVector nominal();
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline JointVector angles(const StateVector& x) { return x.head<3>(); }
inline JointVector rates(const StateVector& x) { return x.tail<3>(); }

inline StateVector make_state(const JointVector& theta,
                              const JointVector& thetadot) {
  StateVector x;
  x << theta, thetadot;
  return x;
}

/// Uniform time grid t_k = t0 + k * step, k = 0..count-1.
struct TimeGrid {
  double t0 = 0.0;
  double step = 0.0;
  int count = 0;

  double time(int k) const { return t0 + k * step; }
  double tf() const { return time(count - 1); }
  bool same_as(const TimeGrid& other) const {
    return count == other.count && t0 == other.t0 && step == other.step;
  }

  /// Builds the grid covering [t0, tf]; throws ValidationError unless the
  /// span is an integer multiple of the step.
  static TimeGrid spanning(double t0, double tf, double step);
};

}  // namespace stsreach

#endif  // STSREACH_TYPES_HPP_
