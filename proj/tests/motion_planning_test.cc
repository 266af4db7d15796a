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

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stsreach/errors.hpp"
#include "stsreach/robot_model.hpp"
#include "stsreach/scenario.hpp"

namespace stsreach::planning {
namespace {

TEST(BlendTest, BoundaryAndMidpointValues) {
  const double tf = 3.5;
  EXPECT_EQ(blend(0.0, tf).value, 0.0);
  EXPECT_EQ(blend(tf, tf).value, 1.0);
  EXPECT_EQ(blend(0.0, tf).rate, 0.0);
  EXPECT_NEAR(blend(tf, tf).rate, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(blend(tf / 2, tf).value, 0.5);
  EXPECT_DOUBLE_EQ(blend(tf / 2, tf).rate, 1.5 / tf);
}

TEST(BlendTest, DerivativesMatchDifferences) {
  const double tf = 2.0, h = 1e-5;
  for (double t = 0.1; t < tf; t += 0.3) {
    EXPECT_NEAR(blend(t, tf).rate,
                (blend(t + h, tf).value - blend(t - h, tf).value) / (2 * h),
                1e-9);
    EXPECT_NEAR(blend(t, tf).accel,
                (blend(t + h, tf).rate - blend(t - h, tf).rate) / (2 * h),
                1e-8);
  }
}

TEST(BlendTest, OutsideHorizonIsRejected) {
  EXPECT_THROW(blend(-0.1, 1.0), DomainError);
  EXPECT_THROW(blend(1.1, 1.0), DomainError);
  EXPECT_THROW(blend(0.5, 0.0), DomainError);
}

TEST(ReferenceZTest, EndpointsOfTheSitToStandBoundary) {
  const auto s = pipeline::Scenario::defaults();
  const ZBoundary b = s.boundary();
  const ZSample start = reference_z(0.0, 3.5, b);
  const ZSample end = reference_z(3.5, 3.5, b);
  EXPECT_EQ(start.z, b.initial);
  EXPECT_NEAR(end.z[0], deg_to_rad(-5.0), 1e-15);
  EXPECT_NEAR(end.z[1], 0.0, 1e-15);
  EXPECT_NEAR(end.z[2], 0.974, 1e-15);
  EXPECT_TRUE(start.zdot.isZero(0));
  EXPECT_LT(end.zdot.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ZToThetaTest, ModelConsistentSeatedPose) {
  const ParamVector p = ParamVector::nominal();
  const JointVector seated(M_PI / 2, -M_PI / 2, M_PI / 2);
  ZSample z{z_of(seated, p), ZVector::Zero(), ZVector::Zero()};
  const JointSample js = z_to_theta(z, p, seated + JointVector(0.05, 0, -0.05));
  EXPECT_LT((js.theta - seated).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_TRUE(js.thetadot.isZero(1e-12));
  EXPECT_TRUE(js.thetaddot.isZero(1e-12));
}

TEST(ZToThetaTest, RoundTripAndVelocityConsistency) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> pert(-0.05, 0.05);
  int checked = 0;
  for (int n = 0; n < 300; ++n) {
    const ParamVector p = oracle::random_params(rng);
    const JointVector th = oracle::random_angles(rng);
    // Skip near-singular poses where the two-link subproblem degenerates.
    if (std::abs(std::sin(th[2])) < 0.2) continue;
    const JointVector thd = oracle::random_rates(rng);
    const OutputVector y = robot::output_map(make_state(th, thd), p);
    ZSample z;
    z.z = ZVector(th[1], y[0], y[1]);
    z.zdot = ZVector(thd[1], y[2], y[3]);
    z.zddot = ZVector(0.3, -0.2, 0.1);
    const JointSample js = z_to_theta(
        z, p, th + JointVector(pert(rng), pert(rng), pert(rng)));
    ASSERT_LT((js.theta - th).cwiseAbs().maxCoeff(), 1e-9) << "draw " << n;
    const OutputVector back =
        robot::output_map(make_state(js.theta, js.thetadot), p);
    EXPECT_NEAR(js.thetadot[1], z.zdot[0], 1e-12);
    EXPECT_LT((back.tail<2>() - z.zdot.tail<2>()).cwiseAbs().maxCoeff(), 1e-8);
    // Accelerations reproduce zddot through a time derivative of the
    // velocity map along theta + s thetadot.
    const double h = 1e-6;
    auto vel = [&](double s) {
      return Eigen::Vector2d(
          robot::output_map(make_state(js.theta + s * js.thetadot +
                                           0.5 * s * s * js.thetaddot,
                                       js.thetadot + s * js.thetaddot),
                            p)
              .tail<2>());
    };
    const Eigen::Vector2d acc = (vel(h) - vel(-h)) / (2 * h);
    EXPECT_LT((acc - z.zddot.tail<2>()).cwiseAbs().maxCoeff(), 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(ZToThetaTest, UnreachableTargetDoesNotConverge) {
  const ParamVector p = ParamVector::nominal();
  ZSample z{ZVector(0.0, 5.0, 5.0), ZVector::Zero(), ZVector::Zero()};
  EXPECT_THROW(z_to_theta(z, p, JointVector(1.5, 0.0, 0.2)), Error);
}

class ReferenceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scenario_ = new pipeline::Scenario(pipeline::Scenario::defaults());
    PlanningProblem problem{scenario_->design_grid(), scenario_->x0,
                            scenario_->boundary(), scenario_->p_nominal,
                            scenario_->allocation};
    ref_ = new ReferenceTrajectory(build_reference(problem));
  }
  static void TearDownTestSuite() {
    delete ref_;
    delete scenario_;
  }
  static pipeline::Scenario* scenario_;
  static ReferenceTrajectory* ref_;
};

pipeline::Scenario* ReferenceTest::scenario_ = nullptr;
ReferenceTrajectory* ReferenceTest::ref_ = nullptr;

TEST_F(ReferenceTest, StartsAtTheSeatedState) {
  EXPECT_LT((ref_->state.front() - scenario_->x0).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST_F(ReferenceTest, EndsWithTheTrunkTarget) {
  EXPECT_NEAR(ref_->state.back()[1], deg_to_rad(-5.0), 1e-12);
  EXPECT_LT(rates(ref_->state.back()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_F(ReferenceTest, OutputGridHas351Samples) {
  EXPECT_EQ(scenario_->flow_grid().count, 351);
  EXPECT_NEAR(ref_->grid.tf(), 3.5, 1e-12);
}

TEST_F(ReferenceTest, CentreOfMassFollowsThePlan) {
  for (int k = 0; k < ref_->grid.count; ++k) {
    const OutputVector y =
        robot::output_map(ref_->state[k], scenario_->p_nominal);
    ASSERT_LT((y.head<2>() - ref_->z[k].z.tail<2>()).cwiseAbs().maxCoeff(),
              1e-6)
        << "sample " << k;
  }
}

TEST_F(ReferenceTest, TrunkAngleIsMonotone) {
  const double dir = ref_->state.back()[1] > ref_->state.front()[1] ? 1 : -1;
  for (int k = 1; k < ref_->grid.count; ++k) {
    ASSERT_GE(dir * (ref_->state[k][1] - ref_->state[k - 1][1]), -1e-15);
  }
}

TEST_F(ReferenceTest, AccelerationAgreesWithFivePointDifferences) {
  const double h = ref_->grid.step;
  double worst = 0.0;
  for (int k = 2; k + 2 < ref_->grid.count; ++k) {
    const JointVector fd =
        (-rates(ref_->state[k + 2]) + 8 * rates(ref_->state[k + 1]) -
         8 * rates(ref_->state[k - 1]) + rates(ref_->state[k - 2])) /
        (12 * h);
    worst = std::max(worst, (fd - ref_->accel[k]).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-4);
}

TEST_F(ReferenceTest, InputsReproduceTheAcceleration) {
  for (int k = 0; k < ref_->grid.count; k += 97) {
    const StateVector f = robot::forward_dynamics(
        ref_->state[k], scenario_->p_nominal, ref_->input[k]);
    EXPECT_LT((f.tail<3>() - ref_->accel[k]).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_GE(ref_->input[k][3], 0.0);
  }
}

}  // namespace
}  // namespace stsreach::planning
