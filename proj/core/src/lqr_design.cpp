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

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "stsreach/errors.hpp"
#include "stsreach/robot_model.hpp"

namespace stsreach::lqr {

void WeightSet::validate() const {
  const auto n = Q.rows();
  if (Q.cols() != n || S.rows() != n || S.cols() != n || R.rows() != R.cols()) {
    throw ValidationError("LQR weights have inconsistent shapes");
  }
  auto check_sym = [](const Eigen::MatrixXd& m, const char* name) {
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() >
                              1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      throw ValidationError(std::string(name) + " must be finite and symmetric");
    }
  };
  check_sym(Q, "Q");
  check_sym(R, "R");
  check_sym(S, "S");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q(Q), r(R), s(S);
  if (q.eigenvalues().minCoeff() < 0.0) throw ValidationError("Q must be PSD");
  if (s.eigenvalues().minCoeff() < 0.0) throw ValidationError("S must be PSD");
  if (r.eigenvalues().minCoeff() <= 0.0) throw ValidationError("R must be PD");
}

WeightSet WeightSet::sit_to_stand() {
  WeightSet w;
  Eigen::VectorXd q(6), r(4), s(6);
  q << 3237, 5534, 6546, 7918, 4003, 8516;
  r << 0.3659, 0.0155, 0.1433, 0.1553;
  s << 1068, 5396, 1324, 9467, 3975, 5819;
  w.Q = q.asDiagonal();
  w.R = r.asDiagonal();
  w.S = s.asDiagonal();
  return w;
}

LinearSchedule linearize_schedule(const planning::ReferenceTrajectory& ref,
                                  const ParamVector& p) {
  LinearSchedule out;
  out.grid = ref.grid;
  out.A.reserve(ref.grid.count);
  out.B1.reserve(ref.grid.count);
  out.B2.reserve(ref.grid.count);
  for (int k = 0; k < ref.grid.count; ++k) {
    const robot::DynamicsJacobians jac =
        robot::dynamics_jacobians(ref.state[k], p, ref.input[k]);
    out.A.emplace_back(jac.A);
    out.B1.emplace_back(jac.B1);
    out.B2.emplace_back(jac.B2);
  }
  return out;
}

Eigen::MatrixXd interpolate_samples(const std::vector<Eigen::MatrixXd>& s,
                                    int k, double frac) {
  const int n = static_cast<int>(s.size());
  if (frac == 0.0) return s[k];
  if (n < 4) return (1.0 - frac) * s[k] + frac * s[k + 1];
  const int first = std::clamp(k - 1, 0, n - 4);
  const double x = k + frac - first;
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) {
    double wi = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) wi *= (x - j) / static_cast<double>(i - j);
    }
    w[i] = wi;
  }
  Eigen::MatrixXd out = w[0] * s[first];
  for (int i = 1; i < 4; ++i) out += w[i] * s[first + i];
  return out;
}

RiccatiSolution solve_riccati(const LinearSchedule& schedule,
                              const WeightSet& weights,
                              const RiccatiOptions& options) {
  namespace odeint = boost::numeric::odeint;
  using Flat = std::vector<double>;

  const TimeGrid& grid = schedule.grid;
  const int n = grid.count;
  if (n < 2 || static_cast<int>(schedule.A.size()) != n ||
      static_cast<int>(schedule.B2.size()) != n) {
    throw GridMismatch("linear schedule does not match its grid");
  }
  const Eigen::LLT<Eigen::MatrixXd> r_llt(weights.R);
  if (r_llt.info() != Eigen::Success) {
    throw ValidationError("R must be positive definite");
  }
  const Eigen::MatrixXd r_inv = r_llt.solve(
      Eigen::MatrixXd::Identity(weights.R.rows(), weights.R.cols()));
  const Eigen::Index dim = weights.S.rows();
  const double horizon = grid.tf() - grid.t0;

  // Backward time tau = tf - t, so dP/dtau = P A + A' P - P B R^-1 B' P + Q.
  auto rhs = [&](const Flat& y, Flat& dy, double tau) {
    const double s = std::clamp((horizon - tau) / grid.step, 0.0, n - 1.0);
    const int k = std::min(static_cast<int>(std::floor(s)), n - 2);
    const double frac = s - k;
    const Eigen::MatrixXd A = interpolate_samples(schedule.A, k, frac);
    const Eigen::MatrixXd B = interpolate_samples(schedule.B2, k, frac);
    const Eigen::Map<const Eigen::MatrixXd> P(y.data(), dim, dim);
    const Eigen::MatrixXd PB = P * B;
    Eigen::Map<Eigen::MatrixXd>(dy.data(), dim, dim) =
        P * A + A.transpose() * P - PB * r_inv * PB.transpose() + weights.Q;
  };

  auto stepper = odeint::make_controlled(
      options.abs_tolerance, options.rel_tolerance,
      odeint::runge_kutta_dopri5<Flat>());

  // Landing points in tau, main and tail samples merged.
  struct Target {
    double tau;
    int main;
    int tail;
  };
  const TimeGrid& tail = options.tail;
  std::vector<Target> targets;
  for (int k = n - 2; k >= 0; --k) {
    targets.push_back({(n - 1 - k) * grid.step, k, -1});
  }
  if (tail.count > 0) {
    if (tail.count < 2 || !(tail.step > 0.0) || tail.t0 < grid.t0 ||
        std::abs(tail.tf() - grid.tf()) > 1e-9 * grid.step) {
      throw GridMismatch("Riccati tail grid must end at the horizon");
    }
    const double merge = 1e-9 * tail.step;
    for (int j = tail.count - 2; j >= 0; --j) {
      const double tau_j = (tail.count - 1 - j) * tail.step;
      auto same = std::find_if(targets.begin(), targets.end(), [&](auto& g) {
        return std::abs(g.tau - tau_j) <= merge;
      });
      if (same != targets.end()) {
        same->tail = j;
      } else {
        targets.push_back({tau_j, -1, j});
      }
    }
    std::sort(targets.begin(), targets.end(),
              [](const Target& a, const Target& b) { return a.tau < b.tau; });
  }

  RiccatiSolution sol;
  sol.grid = grid;
  sol.P.resize(n);
  sol.P[n - 1] = weights.S;
  sol.tail = tail;
  sol.tail_P.resize(tail.count);
  if (tail.count > 0) sol.tail_P[tail.count - 1] = weights.S;
  Flat y(weights.S.data(), weights.S.data() + weights.S.size());
  double tau = 0.0;
  const double min_step = tail.count > 0 ? std::min(grid.step, tail.step)
                                         : grid.step;
  double dt = 1e-3 * min_step;
  for (const Target& target : targets) {
    const double tau_end = target.tau;
    int rejected = 0;
    while (tau < tau_end) {
      const bool clipped = tau + dt > tau_end;
      double trial = clipped ? tau_end - tau : dt;
      if (stepper.try_step(rhs, y, tau, trial) == odeint::success) {
        if (clipped || tau_end - tau < 1e-12 * min_step) tau = tau_end;
        // A step shortened to hit the sample says little about the scale.
        if (!clipped || trial > dt) dt = trial;
      } else {
        dt = trial;
        if (++rejected > 100000 || !(dt > 1e-14 * min_step)) {
          throw BlowUp("Riccati step size underflow at t=" +
                       std::to_string(grid.tf() - tau) + " s");
        }
      }
    }
    Eigen::Map<Eigen::MatrixXd> P(y.data(), dim, dim);
    P = (0.5 * (P + P.transpose())).eval();
    if (!P.allFinite() || P.norm() > options.blowup_ceiling) {
      throw BlowUp("Riccati solution exceeded " +
                   std::to_string(options.blowup_ceiling) + " at t=" +
                   std::to_string(grid.tf() - tau_end) + " s");
    }
    if (target.main >= 0) sol.P[target.main] = P;
    if (target.tail >= 0) sol.tail_P[target.tail] = P;
  }
  return sol;
}

GainSchedule gain_schedule(const RiccatiSolution& riccati,
                           const LinearSchedule& schedule,
                           const Eigen::MatrixXd& R) {
  if (!riccati.grid.same_as(schedule.grid)) {
    throw GridMismatch("Riccati solution and schedule grids differ");
  }
  const Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  GainSchedule out;
  out.grid = schedule.grid;
  out.K.reserve(schedule.grid.count);
  for (int k = 0; k < schedule.grid.count; ++k) {
    out.K.push_back(r_llt.solve(schedule.B2[k].transpose() * riccati.P[k]));
  }
  // Tail samples take B2 interpolated the same way the Riccati rhs does.
  const TimeGrid& grid = schedule.grid;
  out.tail = riccati.tail;
  out.tail_K.reserve(riccati.tail.count);
  for (int j = 0; j < riccati.tail.count; ++j) {
    const double s = (riccati.tail.time(j) - grid.t0) / grid.step;
    const double nearest = std::round(s);
    Eigen::MatrixXd B;
    if (std::abs(s - nearest) <= 1e-9) {
      B = schedule.B2[static_cast<int>(nearest)];
    } else {
      const int k = std::min(static_cast<int>(std::floor(s)), grid.count - 2);
      B = interpolate_samples(schedule.B2, k, s - k);
    }
    out.tail_K.push_back(r_llt.solve(B.transpose() * riccati.tail_P[j]));
  }
  return out;
}

}  // namespace stsreach::lqr
