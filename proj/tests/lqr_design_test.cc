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
#include "stsreach/lqr_design.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stsreach/closed_loop.hpp"
#include "stsreach/errors.hpp"
#include "stsreach/robot_model.hpp"
#include "stsreach/scenario.hpp"

namespace stsreach::lqr {
namespace {

using Eigen::MatrixXd;

LinearSchedule constant_schedule(const TimeGrid& grid, const MatrixXd& a,
                                 const MatrixXd& b) {
  LinearSchedule s;
  s.grid = grid;
  s.A.assign(grid.count, a);
  s.B1.assign(grid.count, MatrixXd::Zero(a.rows(), 1));
  s.B2.assign(grid.count, b);
  return s;
}

WeightSet weights(MatrixXd q, MatrixXd r, MatrixXd s) {
  return WeightSet{std::move(q), std::move(r), std::move(s)};
}

TEST(RiccatiTest, ScalarAnalyticSolution) {
  const double tf = 2.0;
  const TimeGrid grid{0.0, tf / 99, 100};
  const MatrixXd one = MatrixXd::Ones(1, 1);
  const auto sched = constant_schedule(grid, MatrixXd::Zero(1, 1), one);
  const auto w = weights(MatrixXd::Zero(1, 1), one, one);
  const RiccatiSolution sol = solve_riccati(sched, w);
  const GainSchedule gains = gain_schedule(sol, sched, w.R);
  double worst = 0.0;
  for (int k = 0; k < grid.count; ++k) {
    const double exact = 1.0 / (1.0 + tf - grid.time(k));
    worst = std::max(worst, std::abs(sol.P[k](0, 0) - exact));
    EXPECT_DOUBLE_EQ(gains.K[k](0, 0), sol.P[k](0, 0));
    // Negative feedback: du = -K dx opposes dx.
    EXPECT_GT(gains.K[k](0, 0), 0.0);
  }
  EXPECT_LE(worst, 1e-8);
  EXPECT_EQ(sol.P.back()(0, 0), 1.0);
}

TEST(RiccatiTest, LongHorizonApproachesAlgebraicFixedPoint) {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd a(3, 3), b(3, 2), lq(3, 3), lr(2, 2);
  for (auto* m : {&a, &b, &lq, &lr}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = n(rng);
  }
  const MatrixXd q = lq * lq.transpose() + 0.5 * MatrixXd::Identity(3, 3);
  const MatrixXd r = lr * lr.transpose() + 0.5 * MatrixXd::Identity(2, 2);
  const TimeGrid grid{0.0, 0.05, 801};
  const auto sched = constant_schedule(grid, a, b);
  const RiccatiSolution sol =
      solve_riccati(sched, weights(q, r, MatrixXd::Identity(3, 3)));
  const MatrixXd& p = sol.P.front();
  const MatrixXd residual = p * a + a.transpose() * p -
                            p * b * r.inverse() * b.transpose() * p + q;
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-4);
}

TEST(RiccatiTest, BlowUpCeilingIsEnforced) {
  const TimeGrid grid{0.0, 0.1, 51};
  // Unstable and uncontrollable: P grows like exp(2 a (tf - t)).
  const auto sched = constant_schedule(grid, MatrixXd::Constant(1, 1, 3.0),
                                       MatrixXd::Zero(1, 1));
  const MatrixXd one = MatrixXd::Ones(1, 1);
  RiccatiOptions options;
  options.blowup_ceiling = 1e6;
  EXPECT_THROW(solve_riccati(sched, weights(one, one, one), options), BlowUp);
}

TEST(RiccatiTest, TailSamplesAgreeWithMainSamples) {
  const double tf = 1.0;
  const TimeGrid grid{0.0, 0.01, 101};
  const MatrixXd one = MatrixXd::Ones(1, 1);
  const auto sched = constant_schedule(grid, MatrixXd::Zero(1, 1), one);
  RiccatiOptions options;
  options.tail = TimeGrid{0.9, 0.001, 101};
  const RiccatiSolution sol =
      solve_riccati(sched, weights(MatrixXd::Zero(1, 1), one, one), options);
  ASSERT_EQ(sol.tail_P.size(), 101u);
  for (int j = 0; j < options.tail.count; ++j) {
    const double exact = 1.0 / (1.0 + tf - options.tail.time(j));
    EXPECT_NEAR(sol.tail_P[j](0, 0), exact, 1e-8);
  }
  EXPECT_EQ(sol.tail_P.front()(0, 0), sol.P[90](0, 0));
}

// Quadratic cost of dx' = (A(t) - B(t) K(t)) dx on [0, tf] by fine RK4.
template <typename Gain>
double ltv_cost(const Gain& gain, const Eigen::Vector2d& x0, double tf) {
  auto a = [](double t) {
    Eigen::Matrix2d m;
    m << 0.0, 1.0, std::sin(t), -0.2;
    return m;
  };
  auto b = [](double t) { return Eigen::Vector2d(0.0, 1.0 + 0.5 * std::cos(t)); };
  // Augmented state [x; accumulated running cost].
  auto rhs = [&](double t, const Eigen::Vector3d& z) {
    const Eigen::Vector2d x = z.head<2>();
    const double u = -gain(t).dot(x);
    Eigen::Vector3d dz;
    dz.head<2>() = a(t) * x + b(t) * u;
    dz[2] = x.squaredNorm() + u * u;
    return dz;
  };
  const int steps = 30000;
  const double h = tf / steps;
  Eigen::Vector3d z(x0[0], x0[1], 0.0);
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Eigen::Vector3d k1 = rhs(t, z);
    const Eigen::Vector3d k2 = rhs(t + h / 2, z + h / 2 * k1);
    const Eigen::Vector3d k3 = rhs(t + h / 2, z + h / 2 * k2);
    const Eigen::Vector3d k4 = rhs(t + h, z + h * k3);
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return z[2] + 5.0 * z.head<2>().squaredNorm();
}

TEST(RiccatiTest, OptimalGainBeatsRandomConstantGains) {
  const double tf = 3.0;
  const TimeGrid grid{0.0, 0.005, 601};
  LinearSchedule sched;
  sched.grid = grid;
  for (int k = 0; k < grid.count; ++k) {
    const double t = grid.time(k);
    MatrixXd a(2, 2), b(2, 1);
    a << 0.0, 1.0, std::sin(t), -0.2;
    b << 0.0, 1.0 + 0.5 * std::cos(t);
    sched.A.push_back(a);
    sched.B2.push_back(b);
    sched.B1.push_back(MatrixXd::Zero(2, 1));
  }
  const auto w = weights(MatrixXd::Identity(2, 2), MatrixXd::Ones(1, 1),
                         5.0 * MatrixXd::Identity(2, 2));
  const GainSchedule gains =
      gain_schedule(solve_riccati(sched, w), sched, w.R);
  auto optimal = [&](double t) {
    const double s = std::min(t / grid.step, grid.count - 1.0 - 1e-12);
    const int k = static_cast<int>(s);
    const double f = s - k;
    return Eigen::Vector2d(((1 - f) * gains.K[k] + f * gains.K[k + 1])
                               .transpose());
  };
  const Eigen::Vector2d x0(1.0, -0.5);
  const double j_opt = ltv_cost(optimal, x0, tf);
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(-1.0, 6.0);
  for (int n = 0; n < 10; ++n) {
    const Eigen::Vector2d kc(u(rng), u(rng));
    EXPECT_LE(j_opt, ltv_cost([&](double) { return kc; }, x0, tf))
        << "gain " << kc.transpose();
  }
}

class SitToStandDesign : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scenario_ = new pipeline::Scenario(pipeline::Scenario::defaults());
    planning::PlanningProblem problem{
        scenario_->design_grid(), scenario_->x0, scenario_->boundary(),
        scenario_->p_nominal, scenario_->allocation};
    ref_ = new planning::ReferenceTrajectory(planning::build_reference(problem));
    sched_ = new LinearSchedule(linearize_schedule(*ref_, scenario_->p_nominal));
    RiccatiOptions options;
    options.tail = scenario_->tail_grid();
    riccati_ = new RiccatiSolution(
        solve_riccati(*sched_, scenario_->weights, options));
    gains_ = new GainSchedule(
        gain_schedule(*riccati_, *sched_, scenario_->weights.R));
    loop_ = new ClosedLoop(*ref_, *gains_);
  }
  static void TearDownTestSuite() {
    delete loop_;
    delete gains_;
    delete riccati_;
    delete sched_;
    delete ref_;
    delete scenario_;
  }
  static pipeline::Scenario* scenario_;
  static planning::ReferenceTrajectory* ref_;
  static LinearSchedule* sched_;
  static RiccatiSolution* riccati_;
  static GainSchedule* gains_;
  static ClosedLoop* loop_;
};

pipeline::Scenario* SitToStandDesign::scenario_ = nullptr;
planning::ReferenceTrajectory* SitToStandDesign::ref_ = nullptr;
LinearSchedule* SitToStandDesign::sched_ = nullptr;
RiccatiSolution* SitToStandDesign::riccati_ = nullptr;
GainSchedule* SitToStandDesign::gains_ = nullptr;
ClosedLoop* SitToStandDesign::loop_ = nullptr;

TEST_F(SitToStandDesign, LinearizationStructure) {
  const ParamVector& p = scenario_->p_nominal;
  for (int k = 0; k < sched_->grid.count; k += 101) {
    EXPECT_TRUE(sched_->A[k].topLeftCorner(3, 3).isZero(0));
    EXPECT_TRUE(sched_->A[k].topRightCorner(3, 3).isIdentity(0));
    const MatrixXd exact = robot::input_jacobian(ref_->state[k], p);
    EXPECT_LT(oracle::rel_error(sched_->B2[k], exact, 1e-12), 1e-6);
  }
  // At rest the velocity quadratic terms contribute nothing.
  EXPECT_LT(sched_->A[0].bottomRightCorner(3, 3).cwiseAbs().maxCoeff(), 1e-6);
}

TEST_F(SitToStandDesign, TerminalValueAndShape) {
  EXPECT_TRUE(riccati_->P.back() == scenario_->weights.S);
  const MatrixXd k_tf = scenario_->weights.R.inverse() *
                        sched_->B2.back().transpose() * scenario_->weights.S;
  EXPECT_LT(oracle::rel_error(gains_->K.back(), k_tf), 1e-12);
  for (const auto& p : riccati_->P) {
    ASSERT_LE((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(p).eigenvalues().minCoeff(),
              -1e-8);
  }
}

TEST_F(SitToStandDesign, DoubledResolutionBarelyMovesInitialCost) {
  pipeline::Scenario fine = *scenario_;
  fine.max_step /= 2;
  planning::PlanningProblem problem{fine.design_grid(), fine.x0,
                                    fine.boundary(), fine.p_nominal,
                                    fine.allocation};
  const auto ref = planning::build_reference(problem);
  RiccatiOptions options;
  options.tail = fine.tail_grid();
  const auto sol = solve_riccati(linearize_schedule(ref, fine.p_nominal),
                                 fine.weights, options);
  EXPECT_LE(oracle::rel_error(sol.P.front(), riccati_->P.front()), 1e-6);
}

TEST_F(SitToStandDesign, FeedbackAtReferenceIsReferenceInput) {
  for (int k = 0; k < ref_->grid.count; k += 37) {
    const double t = ref_->grid.time(k);
    EXPECT_TRUE(loop_->feedback(t, ref_->state[k]) == ref_->input[k]);
  }
}

TEST_F(SitToStandDesign, FeedbackIsAffineWithSlopeMinusK) {
  std::mt19937_64 rng(109);
  std::normal_distribution<double> n(0.0, 0.01);
  for (double t : {0.0, 0.123, 1.7, 3.4999}) {
    StateVector d;
    for (int i = 0; i < kStateDim; ++i) d[i] = n(rng);
    const StateVector x = loop_->reference_state(t);
    const InputVector diff = loop_->feedback(t, x + 2 * d) -
                             loop_->feedback(t, x + d);
    EXPECT_LT((diff + loop_->gain(t) * d).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST_F(SitToStandDesign, ClosedLoopTracksReferenceAtNominal) {
  double worst = 0.0;
  for (int k = 0; k < ref_->grid.count; ++k) {
    const double t = ref_->grid.time(k);
    const StateVector f = loop_->rhs(t, ref_->state[k], scenario_->p_nominal);
    StateVector expected;
    expected << rates(ref_->state[k]), ref_->accel[k];
    worst = std::max(worst, (f - expected).norm());
  }
  EXPECT_LE(worst, 1e-4);
  ParamVector other = scenario_->p_nominal;
  other.values[kM3] *= 1.05;
  const StateVector f = loop_->rhs(1.0, loop_->reference_state(1.0), other);
  StateVector at_nominal = loop_->rhs(1.0, loop_->reference_state(1.0),
                                      scenario_->p_nominal);
  EXPECT_GT((f - at_nominal).norm(), 1e-3);
}

TEST_F(SitToStandDesign, ContinuousBetweenSamples) {
  const double h = ref_->grid.step;
  const double t = ref_->grid.time(1000);
  const StateVector x = ref_->state[1000];
  const InputVector left = loop_->feedback(t - 1e-12, x);
  const InputVector right = loop_->feedback(t + 1e-12, x);
  EXPECT_LT((left - right).cwiseAbs().maxCoeff(), 1e-6);
  const InputVector mid = loop_->feedback(t + 0.5 * h, x);
  EXPECT_TRUE(mid.allFinite());
}

TEST_F(SitToStandDesign, OutsideHorizonIsRejected) {
  EXPECT_THROW(loop_->feedback(-0.01, ref_->state[0]), DomainError);
  EXPECT_THROW(loop_->feedback(3.51, ref_->state[0]), DomainError);
}

}  // namespace
}  // namespace stsreach::lqr
