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
#ifndef STSREACH_SAMPLING_HPP_
#define STSREACH_SAMPLING_HPP_

#include <cstdint>
#include <vector>

#include "stsreach/reachability.hpp"

namespace stsreach::reach {

/// Latin hypercube design of n points in the box: every coordinate is split
/// into n equal bins holding exactly one point each. Deterministic in seed
/// (mt19937_64 with a portable shuffle and uniform mapping).
std::vector<VectorXd> latin_hypercube(int n, const ParamBox& box,
                                      std::uint64_t seed);

}  // namespace stsreach::reach

#endif  // STSREACH_SAMPLING_HPP_
