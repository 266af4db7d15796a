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
#ifndef STSREACH_SCENARIO_HPP_
#define STSREACH_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stsreach/control_allocation.hpp"
#include "stsreach/lqr_design.hpp"
#include "stsreach/motion_planning.hpp"
#include "stsreach/reachability.hpp"
#include "stsreach/types.hpp"

namespace stsreach::pipeline {

struct FalsificationSettings {
  bool enabled = false;
  int leading_samples = 17;  // refine the first N output samples
  int max_evaluations = 400;  // per sample
  int starts = 8;
  std::uint64_t seed = 3;
};

/// Everything a run depends on. Angles are radians in memory; scenario
/// files carry degrees.
struct Scenario {
  double t0 = 0.0;
  double tf = 3.5;
  double grid_hz = 100.0;
  double max_step = 1e-3;  // upper bound on the fixed RK4 step (s)
  // The last tail_span seconds use RK4 steps of at most tail_step, and the
  // gains there are sampled at half that step. 0 disables the refinement.
  double tail_span = 2e-3;
  double tail_step = 1e-5;
  StateVector x0 = StateVector::Zero();
  ParamVector p_nominal;
  reach::ParamBox box;
  std::optional<planning::ZVector> z_initial;  // default: z of x0 at p_nominal
  planning::ZVector z_final = planning::ZVector::Zero();
  allocation::AllocationSpec allocation;
  lqr::WeightSet weights;
  int n_bounds = 500;
  int n_validate = 500;
  std::uint64_t seed_bounds = 1;
  std::uint64_t seed_validate = 2;
  FalsificationSettings falsification;
  int workers = 0;  // 0 = hardware concurrency
  double riccati_ceiling = 1e12;

  /// The sit-to-stand study configuration.
  static Scenario defaults();

  /// Throws ValidationError naming the offending field.
  void validate() const;

  planning::ZBoundary boundary() const;
  /// Output sample spacing 1 / grid_hz.
  double output_step() const { return 1.0 / grid_hz; }
  /// RK4 steps per output sample.
  int substeps() const;
  /// Grid of reference, linearization and gains: half the RK4 step, so
  /// every RK4 stage time is a stored sample.
  TimeGrid design_grid() const;
  reach::FlowGrid flow_grid() const;
  /// Fine gain grid over the refined tail; count 0 when disabled.
  TimeGrid tail_grid() const;
};

/// Parses the JSON scenario format. Missing keys keep their defaults and
/// add a line to notices; unknown keys raise ParseError; an empty document
/// yields the defaults.
Scenario parse_scenario(std::string_view text,
                        std::vector<std::string>* notices = nullptr);

/// Reads and parses a scenario file. Throws IoError when unreadable.
Scenario load_scenario(const std::filesystem::path& path,
                       std::vector<std::string>* notices = nullptr);

/// Canonical JSON rendering (degrees, fixed key order). Parsing it back
/// reproduces the scenario.
std::string scenario_to_json(const Scenario& scenario);

/// Hex FNV-1a digest of the canonical JSON with the worker count removed.
std::string config_hash(const Scenario& scenario);

}  // namespace stsreach::pipeline

#endif  // STSREACH_SCENARIO_HPP_
