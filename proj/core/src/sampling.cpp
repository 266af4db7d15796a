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
#include "stsreach/sampling.hpp"

#include <numeric>
#include <random>

#include "stsreach/errors.hpp"

namespace stsreach::reach {
namespace {

__extension__ using Uint128 = unsigned __int128;

// Uniform integer in [0, bound) by 128-bit multiply-shift.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>(
      (static_cast<Uint128>(rng()) * bound) >> 64);
}

// Uniform double in (0, 1), kept off the bin edges.
double unit(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 1e-9 + u * (1.0 - 2e-9);
}

}  // namespace

std::vector<VectorXd> latin_hypercube(int n, const ParamBox& box,
                                      std::uint64_t seed) {
  if (n < 1) throw ValidationError("latin_hypercube needs n >= 1");
  box.validate();
  std::mt19937_64 rng(seed);
  const int dim = box.dim();
  std::vector<VectorXd> points(n, VectorXd(dim));
  std::vector<int> perm(n);
  for (int j = 0; j < dim; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[bounded(rng, static_cast<std::uint64_t>(i) + 1)]);
    }
    const double width = box.upper[j] - box.lower[j];
    for (int i = 0; i < n; ++i) {
      points[i][j] = box.lower[j] + width * ((perm[i] + unit(rng)) / n);
    }
  }
  return points;
}

}  // namespace stsreach::reach
