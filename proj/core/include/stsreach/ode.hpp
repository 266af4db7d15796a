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
#ifndef STSREACH_ODE_HPP_
#define STSREACH_ODE_HPP_

namespace stsreach {

/// One classical fourth-order Runge-Kutta step of dy/dt = rhs(t, y).
/// State may be any Eigen dense type; rhs must return an evaluated object.
template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, double t, const State& y, double h) {
  const double half = 0.5 * h;
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + half, State(y + half * k1));
  const State k3 = rhs(t + half, State(y + half * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace stsreach

#endif  // STSREACH_ODE_HPP_
