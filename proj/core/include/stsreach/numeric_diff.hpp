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

#ifndef STSREACH_NUMERIC_DIFF_HPP_
#define STSREACH_NUMERIC_DIFF_HPP_

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace stsreach {

/// Central-difference step for coordinate value v: eps^(1/3) * max(1, |v|).
inline double central_step(double v) {
  static const double kBase =
      std::cbrt(std::numeric_limits<double>::epsilon());
  return kBase * std::max(1.0, std::abs(v));
}

/// Jacobian of fn at v by central differences, one column per coordinate.
/// fn must return a column vector; OutRows is its (possibly dynamic) size.
template <int OutRows, typename Vec, typename Fn>
Eigen::Matrix<double, OutRows, Vec::RowsAtCompileTime> central_jacobian(
    Fn&& fn, const Vec& v, int out_rows = OutRows) {
  Eigen::Matrix<double, OutRows, Vec::RowsAtCompileTime> jac(out_rows,
                                                              v.size());
  Vec probe = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double h = central_step(v[i]);
    // Use the representable step so the quotient sees the true spacing.
    const double plus = v[i] + h;
    const double minus = v[i] - h;
    probe[i] = plus;
    const auto f_plus = fn(probe);
    probe[i] = minus;
    const auto f_minus = fn(probe);
    probe[i] = v[i];
    jac.col(i) = (f_plus - f_minus) / (plus - minus);
  }
  return jac;
}

}  // namespace stsreach

#endif  // STSREACH_NUMERIC_DIFF_HPP_
