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
#include "stsreach/robot_model.hpp"

#include <cmath>
#include <string>

#include "stsreach/errors.hpp"
#include "stsreach/numeric_diff.hpp"

namespace stsreach {

void ParamVector::validate() const {
  for (int i = 0; i < kNumParams; ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0) {
      throw ValidationError("parameter " + std::string(kParamNames[i]) +
                            " must be finite and > 0, got " +
                            std::to_string(values[i]));
    }
  }
  for (int link = 0; link < 3; ++link) {
    if (values[kLc1 + link] > values[kL1 + link]) {
      throw ValidationError("parameter " +
                            std::string(kParamNames[kLc1 + link]) +
                            " exceeds link length " +
                            std::string(kParamNames[kL1 + link]));
    }
  }
}

ParamVector ParamVector::nominal() {
  Raw raw;
  raw << 9.68, 12.59, 44.57, 1.16, 0.52, 2.56, 0.53, 0.41, 0.52, 0.265, 0.205,
      0.26;
  return ParamVector(raw);
}

TimeGrid TimeGrid::spanning(double t0, double tf, double step) {
  if (!(step > 0.0) || !(tf > t0)) {
    throw ValidationError("time grid needs tf > t0 and step > 0");
  }
  const double intervals = (tf - t0) / step;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ValidationError("time span " + std::to_string(tf - t0) +
                          " s is not a multiple of step " +
                          std::to_string(step) + " s");
  }
  return TimeGrid{t0, step, static_cast<int>(rounded) + 1};
}

namespace robot {
namespace {

struct Trig {
  double c1, s1, c12, s12, c123, s123;
  double c2, s2, c3, s3, c23, s23;
};

Trig trig(const JointVector& th) {
  const double a1 = th[0];
  const double a12 = th[0] + th[1];
  const double a123 = a12 + th[2];
  return Trig{std::cos(a1),         std::sin(a1),
              std::cos(a12),        std::sin(a12),
              std::cos(a123),       std::sin(a123),
              std::cos(th[1]),      std::sin(th[1]),
              std::cos(th[2]),      std::sin(th[2]),
              std::cos(th[1] + th[2]), std::sin(th[1] + th[2])};
}

}  // namespace

MassMoments mass_moments(const ParamVector& p) {
  return MassMoments{1.0 / (p.m1() + p.m2() + p.m3()),
                     p.lc1() * p.m1() + p.l1() * p.m2() + p.l1() * p.m3(),
                     p.lc2() * p.m2() + p.l2() * p.m3(), p.lc3() * p.m3()};
}

Eigen::Matrix3d mass_matrix(const JointVector& theta, const ParamVector& p) {
  const Trig t = trig(theta);
  const double l1 = p.l1(), l2 = p.l2();
  const double lc1 = p.lc1(), lc2 = p.lc2(), lc3 = p.lc3();
  const double m1 = p.m1(), m2 = p.m2(), m3 = p.m3();
  const double I1 = p.I1(), I2 = p.I2(), I3 = p.I3();

  const double m11 =
      I1 + I2 + I3 + lc1 * lc1 * m1 +
      m2 * (l1 * l1 + 2 * l1 * lc2 * t.c2 + lc2 * lc2) +
      m3 * (l1 * l1 + 2 * l1 * l2 * t.c2 + 2 * l1 * lc3 * t.c23 + l2 * l2 +
            2 * l2 * lc3 * t.c3 + lc3 * lc3);
  const double m12 = I2 + I3 + lc2 * m2 * (l1 * t.c2 + lc2) +
                     m3 * (l1 * l2 * t.c2 + l1 * lc3 * t.c23 + l2 * l2 +
                           2 * l2 * lc3 * t.c3 + lc3 * lc3);
  const double m13 = I3 + lc3 * m3 * (l1 * t.c23 + l2 * t.c3 + lc3);
  const double m22 =
      I2 + I3 + lc2 * lc2 * m2 + m3 * (l2 * l2 + 2 * l2 * lc3 * t.c3 + lc3 * lc3);
  const double m23 = I3 + lc3 * m3 * (l2 * t.c3 + lc3);
  const double m33 = I3 + lc3 * lc3 * m3;

  Eigen::Matrix3d M;
  M << m11, m12, m13,
       m12, m22, m23,
       m13, m23, m33;
  return M;
}

Eigen::Matrix3d coriolis_coefficients(const JointVector& theta,
                                      const ParamVector& p) {
  const Trig t = trig(theta);
  const MassMoments k = mass_moments(p);
  const double l1 = p.l1(), l2 = p.l2();
  Eigen::Matrix3d omega;
  omega << l1 * (k.k2 * t.s2 + k.k3 * t.s23),
           -k.k2 * l1 * t.s2 + k.k3 * l2 * t.s3,
           -k.k3 * (l1 * t.s23 + l2 * t.s3),
           l1 * (k.k2 * t.s2 + k.k3 * t.s23),
           k.k3 * l2 * t.s3,
           -k.k3 * l2 * t.s3,
           l1 * k.k3 * t.s23,
           k.k3 * l2 * t.s3,
           0.0;
  return omega;
}

JointVector gravity_term(const JointVector& theta, const ParamVector& p) {
  const Trig t = trig(theta);
  const MassMoments k = mass_moments(p);
  return kGravity * JointVector(k.k1 * t.c1 + k.k2 * t.c12 + k.k3 * t.c123,
                                k.k2 * t.c12 + k.k3 * t.c123, k.k3 * t.c123);
}

JointVector coriolis_gravity(const JointVector& theta,
                             const JointVector& thetadot,
                             const ParamVector& p) {
  const double w1 = thetadot[0];
  const double w12 = w1 + thetadot[1];
  const double w123 = w12 + thetadot[2];
  const JointVector squared_rates(w1 * w1, w12 * w12, w123 * w123);
  return coriolis_coefficients(theta, p) * squared_rates +
         gravity_term(theta, p);
}

ForceMatrix generalized_force_matrix(const JointVector& theta,
                                     const ParamVector& p) {
  const Trig t = trig(theta);
  const double l1 = p.l1(), l2 = p.l2(), l3 = p.l3();
  ForceMatrix a;
  a << 0.0, -1.0, -l1 * t.s1 - l2 * t.s12 - l3 * t.s123,
       l1 * t.c1 + l2 * t.c12 + l3 * t.c123,
       0.0, -1.0, -l2 * t.s12 - l3 * t.s123, l2 * t.c12 + l3 * t.c123,
       1.0, -1.0, -l3 * t.s123, l3 * t.c123;
  return a;
}

JointVector solve_mass(const JointVector& theta, const ParamVector& p,
                       const JointVector& rhs) {
  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(mass_matrix(theta, p));
  const double rcond = lu.rcond();
  if (!(rcond >= 1e-12)) {
    throw LinearSolveFailure("mass matrix is numerically singular (rcond=" +
                             std::to_string(rcond) + ")");
  }
  return lu.solve(rhs);
}

StateVector forward_dynamics(const StateVector& x, const ParamVector& p,
                             const InputVector& u) {
  const JointVector theta = angles(x);
  const JointVector thetadot = rates(x);
  const JointVector torque = generalized_force_matrix(theta, p) * u -
                             coriolis_gravity(theta, thetadot, p);
  return make_state(thetadot, solve_mass(theta, p, torque));
}

DynamicsJacobians dynamics_jacobians(const StateVector& x,
                                     const ParamVector& p,
                                     const InputVector& u) {
  DynamicsJacobians jac;
  jac.A = central_jacobian<kStateDim>(
      [&](const StateVector& xs) { return forward_dynamics(xs, p, u); }, x);
  jac.B1 = central_jacobian<kStateDim>(
      [&](const ParamVector::Raw& ps) {
        return forward_dynamics(x, ParamVector(ps), u);
      },
      p.values);
  jac.B2 = central_jacobian<kStateDim>(
      [&](const InputVector& us) { return forward_dynamics(x, p, us); }, u);
  return jac;
}

StateInputMatrix input_jacobian(const StateVector& x, const ParamVector& p) {
  const JointVector theta = angles(x);
  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(mass_matrix(theta, p));
  if (!(lu.rcond() >= 1e-12)) {
    throw LinearSolveFailure("mass matrix is numerically singular");
  }
  StateInputMatrix b = StateInputMatrix::Zero();
  b.bottomRows<3>() = lu.solve(generalized_force_matrix(theta, p));
  return b;
}

OutputVector output_map(const StateVector& x, const ParamVector& p) {
  const Trig t = trig(angles(x));
  const MassMoments k = mass_moments(p);
  const double w1 = x[3], w2 = x[4], w3 = x[5];
  const double x_com = k.k0 * (k.k1 * t.c1 + k.k2 * t.c12 + k.k3 * t.c123);
  const double y_com = k.k0 * (k.k1 * t.s1 + k.k2 * t.s12 + k.k3 * t.s123);
  const double vx = -w1 * y_com - w2 * k.k0 * (k.k2 * t.s12 + k.k3 * t.s123) -
                    w3 * k.k0 * k.k3 * t.s123;
  const double vy = w1 * x_com + w2 * k.k0 * (k.k2 * t.c12 + k.k3 * t.c123) +
                    w3 * k.k0 * k.k3 * t.c123;
  return OutputVector(x_com, y_com, vx, vy);
}

OutputStateMatrix output_jacobian_x(const StateVector& x,
                                    const ParamVector& p) {
  const Trig t = trig(angles(x));
  const MassMoments k = mass_moments(p);
  const double w1 = x[3], w2 = x[4], w3 = x[5];
  const double x_com = k.k0 * (k.k1 * t.c1 + k.k2 * t.c12 + k.k3 * t.c123);
  const double y_com = k.k0 * (k.k1 * t.s1 + k.k2 * t.s12 + k.k3 * t.s123);
  const double k4 = k.k0 * (k.k2 * t.s12 + k.k3 * t.s123);
  const double k5 = k.k0 * k.k3 * t.s123;
  const double k6 = k.k0 * (k.k2 * t.c12 + k.k3 * t.c123);
  const double k7 = k.k0 * k.k3 * t.c123;

  Eigen::Matrix<double, 2, 3> z11;
  z11 << -y_com, -k4, -k5,
         x_com, k6, k7;

  Eigen::Matrix<double, 2, 3> rate_part;
  rate_part << x_com * w1 + k6 * w2 + k7 * w3, k7 * w3, 0.0,
               y_com * w1 + k4 * w2 + k5 * w3, k5 * w3, 0.0;
  Eigen::Matrix<double, 2, 3> sum_part;
  sum_part << 0.0, k6 * (w1 + w2), k7 * (w1 + w2 + w3),
              0.0, k4 * (w1 + w2), k5 * (w1 + w2 + w3);
  const Eigen::Matrix<double, 2, 3> z21 = -rate_part - sum_part;

  OutputStateMatrix jac = OutputStateMatrix::Zero();
  jac.block<2, 3>(0, 0) = z11;
  jac.block<2, 3>(2, 0) = z21;
  jac.block<2, 3>(2, 3) = z11;
  return jac;
}

OutputParamMatrix output_jacobian_p(const StateVector& x,
                                    const ParamVector& p) {
  const Trig t = trig(angles(x));
  const MassMoments k = mass_moments(p);
  const double w1 = x[3], w2 = x[4], w3 = x[5];
  const double l1 = p.l1(), l2 = p.l2();
  const double lc1 = p.lc1(), lc2 = p.lc2(), lc3 = p.lc3();
  const double m1 = p.m1(), m2 = p.m2(), m3 = p.m3();
  const double k0 = k.k0;
  const double x_com = k0 * (k.k1 * t.c1 + k.k2 * t.c12 + k.k3 * t.c123);
  const double y_com = k0 * (k.k1 * t.s1 + k.k2 * t.s12 + k.k3 * t.s123);
  const double k8 = k0 * ((k.k2 * t.s12 + k.k3 * t.s123) * w2 +
                          lc3 * m3 * t.s123 * w3);
  const double k9 = k0 * ((k.k2 * t.c12 + k.k3 * t.c123) * w2 +
                          lc3 * m3 * t.c123 * w3);

  using Block = Eigen::Matrix<double, 2, 3>;
  Block com_cos;  // mass columns of the position rows before the k0 shift
  com_cos << lc1 * t.c1, l1 * t.c1 + lc2 * t.c12,
             l1 * t.c1 + l2 * t.c12 + lc3 * t.c123,
             lc1 * t.s1, l1 * t.s1 + lc2 * t.s12,
             l1 * t.s1 + l2 * t.s12 + lc3 * t.s123;
  Block shift;
  shift << x_com, x_com, x_com,
           y_com, y_com, y_com;
  const Block z11 = k0 * com_cos - k0 * shift;

  Block z13;
  z13 << (m2 + m3) * t.c1, m3 * t.c12, 0.0,
         (m2 + m3) * t.s1, m3 * t.s12, 0.0;
  z13 *= k0;

  Block z14;
  z14 << m1 * t.c1, m2 * t.c12, m3 * t.c123,
         m1 * t.s1, m2 * t.s12, m3 * t.s123;
  z14 *= k0;

  Block d_theta1;
  d_theta1 << -lc1 * t.s1, -(l1 * t.s1 + lc2 * t.s12),
              -(l1 * t.s1 + l2 * t.s12 + lc3 * t.s123),
              lc1 * t.c1, l1 * t.c1 + lc2 * t.c12,
              l1 * t.c1 + l2 * t.c12 + lc3 * t.c123;
  Block com_shift;
  com_shift << y_com, y_com, y_com,
               -x_com, -x_com, -x_com;
  Block d_theta2;
  d_theta2 << 0.0, -lc2 * t.s12, -(l2 * t.s12 + lc3 * t.s123),
              0.0, lc2 * t.c12, l2 * t.c12 + lc3 * t.c123;
  Block rate_terms;
  rate_terms << k8, k8, k8 - lc3 * t.s123 * w3,
                -k9, -k9, lc3 * t.c123 * w3 - k9;
  const Block z21 = k0 * w1 * d_theta1 + k0 * w1 * com_shift +
                    k0 * w2 * d_theta2 + k0 * rate_terms;

  Block z23;
  z23 << -(m2 + m3) * t.s1 * w1, -m3 * t.s12 * (w1 + w2), 0.0,
         (m2 + m3) * t.c1 * w1, m3 * t.c12 * (w1 + w2), 0.0;
  z23 *= k0;

  Block z24;
  z24 << -m1 * t.s1 * w1, -m2 * t.s12 * (w1 + w2),
         -m3 * t.s123 * (w1 + w2 + w3),
         m1 * t.c1 * w1, m2 * t.c12 * (w1 + w2),
         m3 * t.c123 * (w1 + w2 + w3);
  z24 *= k0;

  OutputParamMatrix jac = OutputParamMatrix::Zero();
  jac.block<2, 3>(0, kM1) = z11;
  jac.block<2, 3>(0, kL1) = z13;
  jac.block<2, 3>(0, kLc1) = z14;
  jac.block<2, 3>(2, kM1) = z21;
  jac.block<2, 3>(2, kL1) = z23;
  jac.block<2, 3>(2, kLc1) = z24;
  return jac;
}

Eigen::Vector2d shoulder_position(const JointVector& theta,
                                  const ParamVector& p) {
  const Trig t = trig(theta);
  return Eigen::Vector2d(p.l1() * t.c1 + p.l2() * t.c12 + p.l3() * t.c123,
                         p.l1() * t.s1 + p.l2() * t.s12 + p.l3() * t.s123);
}

}  // namespace robot
}  // namespace stsreach
