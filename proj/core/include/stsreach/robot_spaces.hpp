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
#ifndef STSREACH_ROBOT_SPACES_HPP_
#define STSREACH_ROBOT_SPACES_HPP_

#include <memory>

#include "stsreach/closed_loop.hpp"
#include "stsreach/reachability.hpp"

/// Adapters exposing the closed-loop sit-to-stand robot to the generic
/// reachability machinery: the state flow, the CoM output map and the
/// feedback input map.
namespace stsreach::sts {

/// x' = f_cl(t, x, p) as a ParametricSystem over 6 states and 12 parameters.
reach::ParametricSystem closed_loop_system(
    std::shared_ptr<const lqr::ClosedLoop> loop);

/// y = zeta(x, p); S_y = dzeta/dx S_x + dzeta/dp.
class OutputSpaceMap final : public reach::StaticMap {
 public:
  int dim() const override { return kOutputDim; }
  reach::VectorXd value(int k, const reach::VectorXd& x,
                        const reach::VectorXd& p) const override;
  reach::MatrixXd sensitivity(int k, const reach::VectorXd& x,
                              const reach::VectorXd& p,
                              const reach::MatrixXd& sx) const override;
};

/// u = u_ref(t) - K(t) (x - x_ref(t)); S_u = -K(t) S_x since the feedback
/// does not depend on p.
class InputSpaceMap final : public reach::StaticMap {
 public:
  InputSpaceMap(std::shared_ptr<const lqr::ClosedLoop> loop,
                reach::FlowGrid grid)
      : loop_(std::move(loop)), grid_(grid) {}

  int dim() const override { return kInputDim; }
  reach::VectorXd value(int k, const reach::VectorXd& x,
                        const reach::VectorXd& p) const override;
  reach::MatrixXd sensitivity(int k, const reach::VectorXd& x,
                              const reach::VectorXd& p,
                              const reach::MatrixXd& sx) const override;

 private:
  std::shared_ptr<const lqr::ClosedLoop> loop_;
  reach::FlowGrid grid_;
};

/// Parameter uncertainty box of the sit-to-stand study (+-5% body weight).
reach::ParamBox sit_to_stand_box();

}  // namespace stsreach::sts

#endif  // STSREACH_ROBOT_SPACES_HPP_
