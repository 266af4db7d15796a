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
#ifndef STSREACH_PIPELINE_HPP_
#define STSREACH_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stsreach/lqr_design.hpp"
#include "stsreach/motion_planning.hpp"
#include "stsreach/reachability.hpp"
#include "stsreach/scenario.hpp"

namespace stsreach::pipeline {

enum class Stage { kPlan, kLqr, kReachX, kReachY, kReachU, kValidate };
using StageSet = std::set<Stage>;

std::string_view stage_name(Stage stage);
/// Parses "plan,lqr,reach-x,...". Throws ParseError on unknown names.
StageSet parse_stages(std::string_view list);
StageSet all_stages();

enum class Space { kState, kOutput, kInput };

std::string_view space_name(Space space);

struct SpaceResult {
  Space space;
  reach::SensitivityBounds bounds;
  reach::ReachBox box;
  reach::Trajectory nominal;  // mapped trajectory at p_nominal
  std::optional<reach::ContainmentReport> containment;
  std::vector<reach::Trajectory> validation;  // mapped validation samples
};

struct FalsificationRecord {
  int time_index;
  double cost;
  int rounds;
  int evaluations;
  int updates;
  bool budget_exhausted;
  double seconds;
};

struct StageTiming {
  std::string name;
  double seconds;
};

struct RunReport {
  Scenario scenario;
  std::string config_hash;
  StageSet stages;
  std::optional<planning::ReferenceTrajectory> reference;
  std::optional<lqr::RiccatiSolution> riccati;
  std::optional<lqr::GainSchedule> gains;
  reach::FlowGrid flow_grid;
  std::vector<SpaceResult> spaces;
  std::vector<FalsificationRecord> falsification;
  std::vector<StageTiming> timings;
  bool bundles_from_cache = false;
  std::size_t vertex_flows = 0;

  const SpaceResult* find(Space space) const;
};

/// Executes the requested stages in pipeline order. Reference, gains and
/// sensitivity bundles are written to artifact_dir; reach stages without
/// plan/lqr in the same run resume from those files. Failures surface as
/// StageError tagged with the stage name.
RunReport run(const Scenario& scenario, const StageSet& stages,
              const std::filesystem::path& artifact_dir);

/// Writes the report CSVs and manifest.json for whatever the run produced.
/// Angles in report CSVs are degrees. Throws IoError.
std::vector<std::filesystem::path> export_report(
    const RunReport& report, const std::filesystem::path& dir);

}  // namespace stsreach::pipeline

#endif  // STSREACH_PIPELINE_HPP_
