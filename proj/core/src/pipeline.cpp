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
#include "stsreach/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "stsreach/artifacts.hpp"
#include "stsreach/closed_loop.hpp"
#include "stsreach/errors.hpp"
#include "stsreach/parallel.hpp"
#include "stsreach/robot_spaces.hpp"
#include "stsreach/sampling.hpp"

namespace stsreach::pipeline {
namespace fs = std::filesystem;
namespace {

constexpr const char* kReferenceFile = "reference.csv";
constexpr const char* kGainsFile = "gains.csv";
constexpr const char* kGainsTailFile = "gains_tail.csv";
constexpr const char* kRiccatiFile = "riccati.csv";
constexpr const char* kBundlesFile = "bundles.bin";
constexpr const char* kStampFile = "artifacts.json";

const std::vector<std::pair<Stage, std::string_view>> kStageNames = {
    {Stage::kPlan, "plan"},      {Stage::kLqr, "lqr"},
    {Stage::kReachX, "reach-x"}, {Stage::kReachY, "reach-y"},
    {Stage::kReachU, "reach-u"}, {Stage::kValidate, "validate"}};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
auto in_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(stage), e.what());
  }
}

bool has(const StageSet& s, Stage stage) { return s.count(stage) > 0; }

Stage reach_stage(Space space) {
  switch (space) {
    case Space::kState: return Stage::kReachX;
    case Space::kOutput: return Stage::kReachY;
    case Space::kInput: return Stage::kReachU;
  }
  return Stage::kReachX;
}

// Stamp tying the resumable artifacts to the configuration that made them.
void write_stamp(const fs::path& dir, const std::string& hash) {
  std::ofstream out(dir / kStampFile, std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kStampFile).string());
  out << nlohmann::json{{"config_hash", hash}}.dump() << '\n';
}

void check_stamp(const fs::path& dir, const std::string& hash) {
  std::ifstream in(dir / kStampFile);
  if (!in) {
    throw IoError("no plan/lqr artifacts in " + dir.string() +
                  "; run the plan and lqr stages first");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw ParseError("unreadable " + (dir / kStampFile).string());
  }
  if (j.value("config_hash", std::string()) != hash) {
    throw ValidationError("artifacts in " + dir.string() +
                          " belong to a different configuration");
  }
}

void check_terminal_cost(const lqr::RiccatiSolution& riccati,
                         const Eigen::MatrixXd& S) {
  if (riccati.P.empty() || riccati.P.back() != S) {
    throw ValidationError("terminal Riccati value differs from S");
  }
}

}  // namespace

std::string_view stage_name(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "?";
}

StageSet parse_stages(std::string_view list) {
  StageSet out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t end = std::min(list.find(',', pos), list.size());
    const std::string_view token = list.substr(pos, end - pos);
    if (!token.empty()) {
      bool found = false;
      for (const auto& [s, name] : kStageNames) {
        if (name == token) {
          out.insert(s);
          found = true;
        }
      }
      if (!found) throw ParseError("unknown stage '" + std::string(token) + "'");
    }
    pos = end + 1;
  }
  if (out.empty()) throw ParseError("no stages given");
  return out;
}

StageSet all_stages() {
  StageSet s;
  for (const auto& [stage, name] : kStageNames) s.insert(stage);
  return s;
}

std::string_view space_name(Space space) {
  switch (space) {
    case Space::kState: return "state";
    case Space::kOutput: return "output";
    case Space::kInput: return "input";
  }
  return "?";
}

const SpaceResult* RunReport::find(Space space) const {
  for (const auto& s : spaces) {
    if (s.space == space) return &s;
  }
  return nullptr;
}

RunReport run(const Scenario& scenario, const StageSet& stages,
              const fs::path& artifact_dir) {
  scenario.validate();
  RunReport report;
  report.scenario = scenario;
  report.config_hash = config_hash(scenario);
  report.stages = stages;
  report.flow_grid = scenario.flow_grid();
  const int workers = resolve_workers(scenario.workers);

  const bool any_reach = has(stages, Stage::kReachX) ||
                         has(stages, Stage::kReachY) ||
                         has(stages, Stage::kReachU);
  if (has(stages, Stage::kValidate) && !any_reach) {
    throw StageError("validate", "needs a reach stage in the same run");
  }
  if (has(stages, Stage::kLqr) && !has(stages, Stage::kPlan)) {
    throw StageError("lqr", "needs the plan stage in the same run");
  }
  std::error_code ec;
  fs::create_directories(artifact_dir, ec);
  if (ec) {
    throw StageError(std::string(stage_name(*stages.begin())),
                     "cannot create " + artifact_dir.string());
  }

  const TimeGrid design = scenario.design_grid();

  if (has(stages, Stage::kPlan)) {
    in_stage("plan", [&] {
      Stopwatch sw;
      planning::PlanningProblem problem{design, scenario.x0,
                                        scenario.boundary(),
                                        scenario.p_nominal,
                                        scenario.allocation};
      report.reference = planning::build_reference(problem);
      write_csv(artifact_dir / kReferenceFile,
                reference_table(*report.reference));
      report.timings.push_back({"plan", sw.seconds()});
    });
  }

  if (has(stages, Stage::kLqr)) {
    in_stage("lqr", [&] {
      Stopwatch sw;
      const auto schedule =
          lqr::linearize_schedule(*report.reference, scenario.p_nominal);
      lqr::RiccatiOptions options;
      options.blowup_ceiling = scenario.riccati_ceiling;
      options.tail = scenario.tail_grid();
      report.riccati = lqr::solve_riccati(schedule, scenario.weights, options);
      check_terminal_cost(*report.riccati, scenario.weights.S);
      report.gains =
          lqr::gain_schedule(*report.riccati, schedule, scenario.weights.R);
      write_csv(artifact_dir / kGainsFile, gain_table(*report.gains));
      if (report.gains->tail.count > 0) {
        write_csv(artifact_dir / kGainsTailFile, gain_table(tail_of(*report.gains)));
      }
      write_csv(artifact_dir / kRiccatiFile, riccati_table(*report.riccati));
      write_stamp(artifact_dir, report.config_hash);
      report.timings.push_back({"lqr", sw.seconds()});
    });
  }

  if (!any_reach) return report;

  const std::string first_reach(
      stage_name(has(stages, Stage::kReachX)   ? Stage::kReachX
                 : has(stages, Stage::kReachY) ? Stage::kReachY
                                               : Stage::kReachU));

  // Resume from persisted plan/lqr output when those stages did not run.
  planning::ReferenceTrajectory reference;
  lqr::GainSchedule gains;
  in_stage(first_reach, [&] {
    if (report.reference && report.gains) {
      reference = *report.reference;
      gains = *report.gains;
      return;
    }
    check_stamp(artifact_dir, report.config_hash);
    reference = reference_from_table(read_csv(artifact_dir / kReferenceFile),
                                     scenario.boundary());
    gains = gains_from_table(read_csv(artifact_dir / kGainsFile));
    if (reference.grid.count != design.count ||
        gains.grid.count != design.count) {
      throw GridMismatch("persisted schedules do not match the design grid");
    }
    reference.grid = design;
    gains.grid = design;
    const TimeGrid tail = scenario.tail_grid();
    if (tail.count > 0) {
      const auto fine = gains_from_table(read_csv(artifact_dir / kGainsTailFile));
      if (fine.grid.count != tail.count) {
        throw GridMismatch("persisted tail gains do not match the tail grid");
      }
      gains.tail = tail;
      gains.tail_K = fine.K;
    }
  });

  const auto loop = std::make_shared<const lqr::ClosedLoop>(reference, gains);
  const reach::ParametricSystem system = sts::closed_loop_system(loop);
  const reach::FlowGrid& grid = report.flow_grid;
  const reach::VectorXd x0 = scenario.x0;
  const reach::VectorXd p_nominal = scenario.p_nominal.values;

  std::vector<reach::TrajectoryBundle> bundles;
  reach::Trajectory nominal_states;
  in_stage(first_reach, [&] {
    Stopwatch sw;
    const fs::path cache = artifact_dir / kBundlesFile;
    report.bundles_from_cache =
        load_bundles(cache, report.config_hash, bundles) &&
        static_cast<int>(bundles.size()) == scenario.n_bounds &&
        !bundles.empty() &&
        static_cast<int>(bundles[0].states.size()) == grid.count;
    if (!report.bundles_from_cache) {
      const auto samples =
          reach::latin_hypercube(scenario.n_bounds, scenario.box,
                                 scenario.seed_bounds);
      bundles.assign(samples.size(), {});
      parallel_for(static_cast<int>(samples.size()), workers, [&](int i) {
        bundles[i] = reach::augmented_flow(system, samples[i], x0, grid);
      });
      save_bundles(cache, report.config_hash, bundles);
    }
    nominal_states = reach::flow(system, p_nominal, x0, grid);
    report.timings.push_back(
        {report.bundles_from_cache ? "bundles (cached)" : "bundles",
         sw.seconds()});
  });

  reach::VertexFlowCache vertices(system, x0, grid, scenario.box);
  const reach::StateMap state_map(kStateDim);
  const sts::OutputSpaceMap output_map;
  const sts::InputSpaceMap input_map(loop, grid);
  auto map_for = [&](Space space) -> const reach::StaticMap& {
    switch (space) {
      case Space::kState: return state_map;
      case Space::kOutput: return output_map;
      case Space::kInput: return input_map;
    }
    return state_map;
  };

  for (const Space space : {Space::kState, Space::kOutput, Space::kInput}) {
    const Stage stage = reach_stage(space);
    if (!has(stages, stage)) continue;
    const std::string name(stage_name(stage));
    in_stage(name, [&] {
      const reach::StaticMap& map = map_for(space);
      SpaceResult result;
      result.space = space;

      Stopwatch sw_bounds;
      result.bounds =
          reach::sample_sensitivity_bounds(bundles, map, workers);
      report.timings.push_back({"bounds " + name, sw_bounds.seconds()});

      if (space == Space::kState && scenario.falsification.enabled) {
        Stopwatch sw_fals;
        const int n = std::min(scenario.falsification.leading_samples,
                               result.bounds.count());
        report.falsification.assign(n, {});
        parallel_for(n, workers, [&](int k) {
          Stopwatch sw;
          reach::FalsificationOptions opts;
          opts.starts = scenario.falsification.starts;
          opts.max_evaluations = scenario.falsification.max_evaluations;
          opts.seed = scenario.falsification.seed + static_cast<unsigned>(k);
          auto evaluator = [&](const reach::VectorXd& p) {
            return reach::augmented_flow(system, p, x0, grid, k)
                .sensitivities[k];
          };
          const auto fr = reach::falsify_bounds(
              result.bounds.lower[k], result.bounds.upper[k], scenario.box,
              evaluator, opts);
          result.bounds.lower[k] = fr.lower;
          result.bounds.upper[k] = fr.upper;
          report.falsification[k] =
              FalsificationRecord{k,         fr.cost,    fr.iterations,
                                  fr.evaluations, fr.updates,
                                  fr.budget_exhausted, sw.seconds()};
        });
        report.timings.push_back({"falsification " + name, sw_fals.seconds()});
      }

      Stopwatch sw_box;
      result.box = reach::over_approximate(result.bounds, map, vertices,
                                           workers);
      result.nominal = reach::map_trajectory(map, nominal_states, p_nominal);
      report.timings.push_back({"over-approximation " + name,
                                sw_box.seconds()});
      report.spaces.push_back(std::move(result));
    });
  }
  report.vertex_flows = vertices.size();

  if (has(stages, Stage::kValidate)) {
    in_stage("validate", [&] {
      Stopwatch sw;
      const auto samples = reach::latin_hypercube(
          scenario.n_validate, scenario.box, scenario.seed_validate);
      std::vector<reach::Trajectory> states(samples.size());
      parallel_for(static_cast<int>(samples.size()), workers, [&](int i) {
        states[i] = reach::flow(system, samples[i], x0, grid);
      });
      for (auto& result : report.spaces) {
        const reach::StaticMap& map = map_for(result.space);
        result.validation.resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
          result.validation[i] =
              reach::map_trajectory(map, states[i], samples[i]);
        }
        result.containment =
            reach::containment_check(result.box, result.validation);
      }
      report.timings.push_back({"validate", sw.seconds()});
    });
  }
  return report;
}

}  // namespace stsreach::pipeline
