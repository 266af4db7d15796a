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
#ifndef STSREACH_CLOSED_LOOP_HPP_
#define STSREACH_CLOSED_LOOP_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "stsreach/lqr_design.hpp"
#include "stsreach/motion_planning.hpp"
#include "stsreach/types.hpp"

namespace stsreach::lqr {

/// The robot under the time-varying LQR state feedback
///   u = u_ref(t) - K(t) (x - x_ref(t)).
/// Reference and gains are linearly interpolated between grid samples and
/// reproduced exactly at them. Immutable once built; share freely.
class ClosedLoop {
 public:
  ClosedLoop(const planning::ReferenceTrajectory& ref,
             const GainSchedule& gains);

  const TimeGrid& grid() const { return grid_; }

  GainMatrix gain(double t) const;
  StateVector reference_state(double t) const;
  InputVector reference_input(double t) const;

  /// Throws DomainError outside [t0, tf].
  InputVector feedback(double t, const StateVector& x) const;

  /// f_cl(t, x, p) = f(x, p, feedback(t, x)).
  StateVector rhs(double t, const StateVector& x, const ParamVector& p) const;

 private:
  struct Locus {
    int k;
    double frac;
  };
  Locus locate(double t) const;
  // Samples tail_gain_ when t lies in the refined tail.
  std::optional<GainMatrix> tail_gain(double t) const;

  TimeGrid grid_;
  std::vector<StateVector> state_;
  std::vector<InputVector> input_;
  std::vector<GainMatrix> gain_;
  TimeGrid tail_{};
  std::vector<GainMatrix> tail_gain_;
};

}  // namespace stsreach::lqr

#endif  // STSREACH_CLOSED_LOOP_HPP_
