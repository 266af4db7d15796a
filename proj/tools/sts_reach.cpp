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
// Command-line front end: sts_reach <plan|lqr|reach|validate|report> [flags]

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stsreach/errors.hpp"
#include "stsreach/pipeline.hpp"
#include "stsreach/scenario.hpp"

namespace {

using stsreach::pipeline::Stage;
using stsreach::pipeline::StageSet;

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kConfig = 3,
  kExport = 4,
  kStageBase = 10,  // + stage index, plan = 10 ... validate = 15
};

int stage_exit_code(const std::string& stage) {
  static const char* names[] = {"plan",    "lqr",     "reach-x",
                                "reach-y", "reach-u", "validate"};
  for (int i = 0; i < 6; ++i) {
    if (stage == names[i]) return kStageBase + i;
  }
  return kInternal;
}

StageSet verb_stages(const std::string& verb) {
  using stsreach::pipeline::all_stages;
  if (verb == "plan") return {Stage::kPlan};
  if (verb == "lqr") return {Stage::kPlan, Stage::kLqr};
  if (verb == "reach") {
    return {Stage::kPlan, Stage::kLqr, Stage::kReachX, Stage::kReachY,
            Stage::kReachU};
  }
  return all_stages();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric reachability of an LQR-tracked sit-to-stand model"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string stages_arg;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> grid_hz;
  std::optional<int> workers;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON scenario file")
      ->check(CLI::ExistingFile);
  app.add_option("--stages", stages_arg,
                 "comma list of plan,lqr,reach-x,reach-y,reach-u,validate");
  app.add_option("--seed", seed,
                 "base seed: bounds use it, validation seed+1, "
                 "falsification seed+2");
  app.add_option("--samples", samples,
                 "sample count for both bound estimation and validation")
      ->check(CLI::PositiveNumber);
  app.add_option("--grid-hz", grid_hz, "output grid frequency")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "worker threads, 0 = all cores")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "artifact and report directory");
  app.add_flag("-q,--quiet", quiet, "suppress notices");

  for (const char* verb : {"plan", "lqr", "reach", "validate", "report"}) {
    app.add_subcommand(verb, std::string("run the ") + verb + " stages");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  const std::string verb = app.get_subcommands().front()->get_name();

  stsreach::pipeline::Scenario scenario;
  StageSet stages;
  try {
    std::vector<std::string> notices;
    scenario = config_path.empty()
                   ? stsreach::pipeline::Scenario::defaults()
                   : stsreach::pipeline::load_scenario(config_path, &notices);
    if (!quiet) {
      for (const auto& n : notices) std::cerr << "notice: " << n << '\n';
    }
    if (seed) {
      scenario.seed_bounds = *seed;
      scenario.seed_validate = *seed + 1;
      scenario.falsification.seed = *seed + 2;
    }
    if (samples) scenario.n_bounds = scenario.n_validate = *samples;
    if (grid_hz) scenario.grid_hz = *grid_hz;
    if (workers) scenario.workers = *workers;
    scenario.validate();
    stages = stages_arg.empty() ? verb_stages(verb)
                                : stsreach::pipeline::parse_stages(stages_arg);
  } catch (const stsreach::Error& e) {
    std::cerr << "sts_reach: [config] " << e.what() << '\n';
    return kConfig;
  }

  stsreach::pipeline::RunReport report;
  try {
    report = stsreach::pipeline::run(scenario, stages, out_dir);
  } catch (const stsreach::StageError& e) {
    std::cerr << "sts_reach: " << e.what() << '\n';
    return stage_exit_code(e.stage());
  } catch (const std::exception& e) {
    std::cerr << "sts_reach: [internal] " << e.what() << '\n';
    return kInternal;
  }

  try {
    const auto files = stsreach::pipeline::export_report(report, out_dir);
    if (!quiet) {
      for (const auto& t : report.timings) {
        std::fprintf(stderr, "%-28s %9.3f s\n", t.name.c_str(), t.seconds);
      }
      for (const auto& r : report.spaces) {
        if (r.containment) {
          std::fprintf(stderr, "containment %-8s %zu/%zu\n",
                       std::string(stsreach::pipeline::space_name(r.space))
                           .c_str(),
                       r.containment->inside, r.containment->checked);
        }
      }
    }
    for (const auto& f : files) std::cout << f.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "sts_reach: [report] " << e.what() << '\n';
    return kExport;
  }
  return kOk;
}
