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
#include "stsreach/closed_loop.hpp"

#include <cmath>
#include <string>

#include "stsreach/errors.hpp"
#include "stsreach/robot_model.hpp"

namespace stsreach::lqr {

ClosedLoop::ClosedLoop(const planning::ReferenceTrajectory& ref,
                       const GainSchedule& gains)
    : grid_(ref.grid), state_(ref.state), input_(ref.input) {
  if (!gains.grid.same_as(ref.grid)) {
    throw GridMismatch("gain schedule grid differs from reference grid");
  }
  gain_.reserve(gains.K.size());
  for (const auto& K : gains.K) {
    if (K.rows() != kInputDim || K.cols() != kStateDim) {
      throw GridMismatch("gain matrices must be 4x6");
    }
    gain_.emplace_back(K);
  }
  if (gains.tail.count > 0) {
    if (gains.tail.count < 2 || gains.tail.t0 < grid_.t0 ||
        std::abs(gains.tail.tf() - grid_.tf()) > 1e-9 * grid_.step ||
        static_cast<int>(gains.tail_K.size()) != gains.tail.count) {
      throw GridMismatch("gain tail must end at the horizon");
    }
    tail_ = gains.tail;
    for (const auto& K : gains.tail_K) tail_gain_.emplace_back(K);
  }
}

std::optional<GainMatrix> ClosedLoop::tail_gain(double t) const {
  if (tail_.count == 0) return std::nullopt;
  const double s = (t - tail_.t0) / tail_.step;
  constexpr double kSnap = 1e-9;
  if (s < -kSnap || s > tail_.count - 1 + kSnap) return std::nullopt;
  const double nearest = std::round(s);
  if (std::abs(s - nearest) <= kSnap) {
    return tail_gain_[static_cast<int>(nearest)];
  }
  const int k = static_cast<int>(std::floor(s));
  const double frac = s - k;
  return GainMatrix((1.0 - frac) * tail_gain_[k] + frac * tail_gain_[k + 1]);
}

ClosedLoop::Locus ClosedLoop::locate(double t) const {
  const double s = (t - grid_.t0) / grid_.step;
  const double last = grid_.count - 1;
  constexpr double kSnap = 1e-9;
  if (!(s >= -kSnap && s <= last + kSnap)) {
    throw DomainError("time " + std::to_string(t) +
                      " s outside the controller horizon");
  }
  const double nearest = std::round(s);
  if (std::abs(s - nearest) <= kSnap) {
    const int k = static_cast<int>(nearest);
    return k >= grid_.count - 1 ? Locus{grid_.count - 2, 1.0} : Locus{k, 0.0};
  }
  const int k = static_cast<int>(std::floor(s));
  return Locus{k, s - k};
}

GainMatrix ClosedLoop::gain(double t) const {
  const Locus l = locate(t);
  if (auto k = tail_gain(t)) return *k;
  if (l.frac == 0.0) return gain_[l.k];
  if (l.frac == 1.0) return gain_[l.k + 1];
  return (1.0 - l.frac) * gain_[l.k] + l.frac * gain_[l.k + 1];
}

StateVector ClosedLoop::reference_state(double t) const {
  const Locus l = locate(t);
  if (l.frac == 0.0) return state_[l.k];
  if (l.frac == 1.0) return state_[l.k + 1];
  return (1.0 - l.frac) * state_[l.k] + l.frac * state_[l.k + 1];
}

InputVector ClosedLoop::reference_input(double t) const {
  const Locus l = locate(t);
  if (l.frac == 0.0) return input_[l.k];
  if (l.frac == 1.0) return input_[l.k + 1];
  return (1.0 - l.frac) * input_[l.k] + l.frac * input_[l.k + 1];
}

InputVector ClosedLoop::feedback(double t, const StateVector& x) const {
  const Locus l = locate(t);
  const auto pick = [&](const auto& v) {
    using T = std::decay_t<decltype(v[0])>;
    if (l.frac == 0.0) return T(v[l.k]);
    if (l.frac == 1.0) return T(v[l.k + 1]);
    return T((1.0 - l.frac) * v[l.k] + l.frac * v[l.k + 1]);
  };
  const auto tail = tail_gain(t);
  return pick(input_) - (tail ? *tail : pick(gain_)) * (x - pick(state_));
}

StateVector ClosedLoop::rhs(double t, const StateVector& x,
                            const ParamVector& p) const {
  return robot::forward_dynamics(x, p, feedback(t, x));
}

}  // namespace stsreach::lqr
