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
#include <fstream>

#include "json.hpp"
#include "stsreach/artifacts.hpp"
#include "stsreach/errors.hpp"
#include "stsreach/pipeline.hpp"

namespace stsreach::pipeline {
namespace fs = std::filesystem;
namespace {

struct Columns {
  std::vector<std::string> names;
  std::vector<double> scale;  // internal unit -> report unit
};

Columns columns_for(Space space) {
  const double deg = rad_to_deg(1.0);
  switch (space) {
    case Space::kState:
      return {{"theta1_deg", "theta2_deg", "theta3_deg", "theta1dot_deg_per_s",
               "theta2dot_deg_per_s", "theta3dot_deg_per_s"},
              std::vector<double>(kStateDim, deg)};
    case Space::kOutput:
      return {{"x_com_m", "y_com_m", "xdot_com_m_per_s", "ydot_com_m_per_s"},
              std::vector<double>(kOutputDim, 1.0)};
    case Space::kInput:
      return {{"tau_h_Nm", "tau_s_Nm", "F_x_N", "F_y_N"},
              std::vector<double>(kInputDim, 1.0)};
  }
  return {};
}

std::string file_for(std::string_view prefix, Space space) {
  return std::string(prefix) + "_" + std::string(space_name(space)) + ".csv";
}

CsvTable reach_table(const SpaceResult& r, const reach::FlowGrid& grid) {
  const Columns cols = columns_for(r.space);
  CsvTable t;
  t.header.push_back("t_s");
  for (const char* prefix : {"lo_", "hi_", "nominal_"}) {
    for (const auto& c : cols.names) t.header.push_back(prefix + c);
  }
  for (int k = 0; k < r.box.count(); ++k) {
    std::vector<double> row{grid.time(k)};
    for (const auto* v : {&r.box.lower[k], &r.box.upper[k], &r.nominal[k]}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        row.push_back((*v)[i] * cols.scale[i]);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Raw sensitivity bounds in internal units, row-major per sample.
CsvTable bounds_table(const SpaceResult& r, const reach::FlowGrid& grid) {
  const Columns cols = columns_for(r.space);
  CsvTable t;
  t.header.push_back("t_s");
  for (const char* prefix : {"lo_", "hi_"}) {
    for (std::size_t i = 0; i < cols.names.size(); ++i) {
      for (int j = 0; j < kNumParams; ++j) {
        t.header.push_back(prefix + std::to_string(i + 1) + "_" +
                           std::string(kParamNames[j]));
      }
    }
  }
  for (int k = 0; k < r.bounds.count(); ++k) {
    std::vector<double> row{grid.time(k)};
    for (const auto* m : {&r.bounds.lower[k], &r.bounds.upper[k]}) {
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        for (Eigen::Index j = 0; j < m->cols(); ++j) row.push_back((*m)(i, j));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable validation_table(const SpaceResult& r, const reach::FlowGrid& grid) {
  const Columns cols = columns_for(r.space);
  CsvTable t;
  t.header = {"sample", "t_s"};
  for (const auto& c : cols.names) t.header.push_back(c);
  for (std::size_t s = 0; s < r.validation.size(); ++s) {
    for (std::size_t k = 0; k < r.validation[s].size(); ++k) {
      std::vector<double> row{static_cast<double>(s),
                              grid.time(static_cast<int>(k))};
      const auto& v = r.validation[s][k];
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        row.push_back(v[i] * cols.scale[i]);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_validation_summary(const RunReport& report, const fs::path& path) {
  std::ofstream out = open_text(path);
  out << "space,checked,inside,fraction,violations,worst_margin\n";
  for (const auto& r : report.spaces) {
    if (!r.containment) continue;
    const auto& c = *r.containment;
    // Smallest distance to the box over all checked points, in report units.
    double worst = std::numeric_limits<double>::infinity();
    const Columns cols = columns_for(r.space);
    for (std::size_t s = 0; s < r.validation.size(); ++s) {
      for (int k = 0; k < r.box.count(); ++k) {
        const auto& v = r.validation[s][k];
        for (Eigen::Index i = 0; i < v.size(); ++i) {
          const double m = std::min(v[i] - r.box.lower[k][i],
                                    r.box.upper[k][i] - v[i]);
          worst = std::min(worst, m * cols.scale[i]);
        }
      }
    }
    out << space_name(r.space) << ',' << c.checked << ',' << c.inside << ','
        << format_number(c.fraction()) << ',' << c.violations.size() << ','
        << format_number(worst) << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

void write_violations(const RunReport& report, const fs::path& path) {
  std::ofstream out = open_text(path);
  out << "space,sample,t_s,coordinate,value,margin\n";
  for (const auto& r : report.spaces) {
    if (!r.containment) continue;
    const Columns cols = columns_for(r.space);
    for (const auto& v : r.containment->violations) {
      out << space_name(r.space) << ',' << v.sample << ','
          << format_number(report.flow_grid.time(v.time_index)) << ','
          << cols.names[v.coordinate] << ','
          << format_number(v.value * cols.scale[v.coordinate]) << ','
          << format_number(v.margin * cols.scale[v.coordinate]) << '\n';
    }
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

CsvTable falsification_table(const RunReport& report) {
  CsvTable t;
  t.header = {"t_s",     "cost",    "rounds",
              "evaluations", "updates", "budget_exhausted"};
  for (const auto& f : report.falsification) {
    t.rows.push_back({report.flow_grid.time(f.time_index), f.cost,
                      static_cast<double>(f.rounds),
                      static_cast<double>(f.evaluations),
                      static_cast<double>(f.updates),
                      f.budget_exhausted ? 1.0 : 0.0});
  }
  return t;
}

}  // namespace

std::vector<fs::path> export_report(const RunReport& report,
                                    const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  std::vector<fs::path> files;
  auto emit = [&](const std::string& name, const CsvTable& table) {
    write_csv(dir / name, table);
    files.push_back(dir / name);
  };

  if (report.reference) emit("reference.csv", reference_table(*report.reference));
  if (report.gains) {
    emit("gains.csv", gain_table(*report.gains));
    if (report.gains->tail.count > 0) {
      emit("gains_tail.csv", gain_table(tail_of(*report.gains)));
    }
  }
  for (const auto& r : report.spaces) {
    emit(file_for("reach", r.space), reach_table(r, report.flow_grid));
    emit(file_for("bounds", r.space), bounds_table(r, report.flow_grid));
    if (r.containment) {
      emit(file_for("validation", r.space),
           validation_table(r, report.flow_grid));
    }
  }
  const bool validated =
      std::any_of(report.spaces.begin(), report.spaces.end(),
                  [](const SpaceResult& r) { return r.containment.has_value(); });
  if (validated) {
    write_validation_summary(report, dir / "validation.csv");
    files.push_back(dir / "validation.csv");
    write_violations(report, dir / "violations.csv");
    files.push_back(dir / "violations.csv");
  }
  if (!report.falsification.empty()) {
    emit("falsification.csv", falsification_table(report));
  }

  using Json = nlohmann::ordered_json;
  const Scenario& s = report.scenario;
  Json m = Json::object();
  m["config_hash"] = report.config_hash;
  m["config"] = Json::parse(scenario_to_json(s));
  Json stages = Json::array();
  for (const Stage st : report.stages) stages.push_back(stage_name(st));
  m["stages"] = stages;
  m["seeds"] = {{"bounds", s.seed_bounds},
                {"validate", s.seed_validate},
                {"falsification", s.falsification.seed}};
  m["samples"] = {{"bounds", s.n_bounds}, {"validate", s.n_validate}};
  m["grid"] = {{"output_step_s", report.flow_grid.step},
               {"output_samples", report.flow_grid.count},
               {"rk4_step_s", report.flow_grid.inner_step()},
               {"design_step_s", s.design_grid().step}};
  m["workers"] = s.workers;
  m["bundles_from_cache"] = report.bundles_from_cache;
  m["vertex_flows"] = report.vertex_flows;
  Json timings = Json::array();
  double total = 0.0;
  for (const auto& t : report.timings) {
    timings.push_back({{"stage", t.name}, {"seconds", t.seconds}});
    total += t.seconds;
  }
  m["timings"] = timings;
  m["total_seconds"] = total;
  Json containment = Json::object();
  for (const auto& r : report.spaces) {
    if (!r.containment) continue;
    containment[std::string(space_name(r.space))] = {
        {"checked", r.containment->checked},
        {"inside", r.containment->inside},
        {"fraction", r.containment->fraction()}};
  }
  m["containment"] = containment;
  Json fals = Json::array();
  for (const auto& f : report.falsification) {
    fals.push_back({{"t_s", report.flow_grid.time(f.time_index)},
                    {"cost", f.cost},
                    {"rounds", f.rounds},
                    {"evaluations", f.evaluations},
                    {"updates", f.updates},
                    {"budget_exhausted", f.budget_exhausted},
                    {"seconds", f.seconds}});
  }
  m["falsification"] = fals;
  Json listed = Json::array();
  for (const auto& f : files) listed.push_back(f.filename().string());
  m["files"] = listed;

  const fs::path manifest = dir / "manifest.json";
  std::ofstream out = open_text(manifest);
  out << m.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + manifest.string());
  files.push_back(manifest);
  return files;
}

}  // namespace stsreach::pipeline
