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
#include "stsreach/robot_spaces.hpp"

#include "stsreach/robot_model.hpp"

namespace stsreach::sts {

reach::ParametricSystem closed_loop_system(
    std::shared_ptr<const lqr::ClosedLoop> loop) {
  reach::ParametricSystem sys;
  sys.state_dim = kStateDim;
  sys.param_dim = kNumParams;
  sys.rhs = [loop = std::move(loop)](double t, const reach::VectorXd& x,
                                     const reach::VectorXd& p) {
    return reach::VectorXd(
        loop->rhs(t, StateVector(x), ParamVector(ParamVector::Raw(p))));
  };
  return sys;
}

reach::VectorXd OutputSpaceMap::value(int, const reach::VectorXd& x,
                                      const reach::VectorXd& p) const {
  return robot::output_map(StateVector(x), ParamVector(ParamVector::Raw(p)));
}

reach::MatrixXd OutputSpaceMap::sensitivity(int, const reach::VectorXd& x,
                                            const reach::VectorXd& p,
                                            const reach::MatrixXd& sx) const {
  const StateVector xs(x);
  const ParamVector ps{ParamVector::Raw(p)};
  return robot::output_jacobian_x(xs, ps) * sx +
         robot::output_jacobian_p(xs, ps);
}

reach::VectorXd InputSpaceMap::value(int k, const reach::VectorXd& x,
                                     const reach::VectorXd&) const {
  return loop_->feedback(grid_.time(k), StateVector(x));
}

reach::MatrixXd InputSpaceMap::sensitivity(int k, const reach::VectorXd&,
                                           const reach::VectorXd&,
                                           const reach::MatrixXd& sx) const {
  return -loop_->gain(grid_.time(k)) * sx;
}

reach::ParamBox sit_to_stand_box() {
  reach::ParamBox box;
  box.lower.resize(kNumParams);
  box.upper.resize(kNumParams);
  box.lower << 9.2, 11.2, 42.3, 1.10, 0.49, 2.40, 0.52, 0.39, 0.51, 0.23, 0.17,
      0.24;
  box.upper << 10.2, 13.2, 46.8, 1.21, 0.54, 2.65, 0.54, 0.42, 0.53, 0.30,
      0.23, 0.28;
  return box;
}

}  // namespace stsreach::sts
