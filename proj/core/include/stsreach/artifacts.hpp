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
#ifndef STSREACH_ARTIFACTS_HPP_
#define STSREACH_ARTIFACTS_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stsreach/lqr_design.hpp"
#include "stsreach/motion_planning.hpp"
#include "stsreach/reachability.hpp"

namespace stsreach::pipeline {

/// Numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// 17 significant digits ("%.17g"); parses back to the same double.
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Reference samples in radians: t, state, acceleration, input.
CsvTable reference_table(const planning::ReferenceTrajectory& ref);
planning::ReferenceTrajectory reference_from_table(
    const CsvTable& table, const planning::ZBoundary& boundary);

/// Row-major gain entries per sample.
CsvTable gain_table(const lqr::GainSchedule& gains);
lqr::GainSchedule gains_from_table(const CsvTable& table);
/// The tail samples of a schedule as a schedule of their own.
lqr::GainSchedule tail_of(const lqr::GainSchedule& gains);

CsvTable riccati_table(const lqr::RiccatiSolution& riccati);

/// Binary bundle cache tagged with a key. load returns false when the file
/// is missing or was written under a different key or shape.
void save_bundles(const std::filesystem::path& path, const std::string& key,
                  std::span<const reach::TrajectoryBundle> bundles);
bool load_bundles(const std::filesystem::path& path, const std::string& key,
                  std::vector<reach::TrajectoryBundle>& out);

}  // namespace stsreach::pipeline

#endif  // STSREACH_ARTIFACTS_HPP_
