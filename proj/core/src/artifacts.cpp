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
#include "stsreach/artifacts.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "stsreach/errors.hpp"

namespace stsreach::pipeline {
namespace {

constexpr char kBundleMagic[8] = {'S', 'T', 'S', 'B', 'N', 'D', 'L', '1'};

const char* const kStateCols[kStateDim] = {
    "theta1_rad",          "theta2_rad",          "theta3_rad",
    "theta1dot_rad_per_s", "theta2dot_rad_per_s", "theta3dot_rad_per_s"};
const char* const kAccelCols[kNumJoints] = {
    "theta1ddot_rad_per_s2", "theta2ddot_rad_per_s2", "theta3ddot_rad_per_s2"};
const char* const kInputCols[kInputDim] = {"tau_h_Nm", "tau_s_Nm", "F_x_N",
                                           "F_y_N"};

void check_width(const CsvTable& t, std::size_t width, const char* what) {
  if (t.header.size() != width) {
    throw ParseError(std::string(what) + " table needs " +
                     std::to_string(width) + " columns");
  }
  if (t.rows.size() < 2) {
    throw ParseError(std::string(what) + " table needs at least two rows");
  }
}

TimeGrid grid_of(const CsvTable& t) {
  const double t0 = t.rows.front()[0];
  const int count = static_cast<int>(t.rows.size());
  return TimeGrid{t0, (t.rows.back()[0] - t0) / (count - 1), count};
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

bool get_matrix(std::istream& in, Eigen::MatrixXd& m) {
  return static_cast<bool>(
      in.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double))));
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out << ',';
    out << table.header[j];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_number(row[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      row.push_back(std::strtod(p, &end));
      if (end == p) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": not a number");
      }
      p = end;
      if (*p == ',') ++p;
    }
    if (row.size() != table.header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": column count differs from header");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable reference_table(const planning::ReferenceTrajectory& ref) {
  CsvTable t;
  t.header.push_back("t_s");
  for (const char* c : kStateCols) t.header.push_back(c);
  for (const char* c : kAccelCols) t.header.push_back(c);
  for (const char* c : kInputCols) t.header.push_back(c);
  for (int k = 0; k < ref.grid.count; ++k) {
    std::vector<double> row{ref.grid.time(k)};
    for (int i = 0; i < kStateDim; ++i) row.push_back(ref.state[k][i]);
    for (int i = 0; i < kNumJoints; ++i) row.push_back(ref.accel[k][i]);
    for (int i = 0; i < kInputDim; ++i) row.push_back(ref.input[k][i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

planning::ReferenceTrajectory reference_from_table(
    const CsvTable& table, const planning::ZBoundary& boundary) {
  check_width(table, 1 + kStateDim + kNumJoints + kInputDim, "reference");
  planning::ReferenceTrajectory ref;
  ref.grid = grid_of(table);
  for (const auto& row : table.rows) {
    StateVector x;
    JointVector a;
    InputVector u;
    for (int i = 0; i < kStateDim; ++i) x[i] = row[1 + i];
    for (int i = 0; i < kNumJoints; ++i) a[i] = row[1 + kStateDim + i];
    for (int i = 0; i < kInputDim; ++i) {
      u[i] = row[1 + kStateDim + kNumJoints + i];
    }
    ref.state.push_back(x);
    ref.accel.push_back(a);
    ref.input.push_back(u);
    ref.z.push_back(planning::reference_z(row[0] - ref.grid.t0,
                                          ref.grid.tf() - ref.grid.t0,
                                          boundary));
  }
  return ref;
}

CsvTable gain_table(const lqr::GainSchedule& gains) {
  CsvTable t;
  t.header.push_back("t_s");
  for (int i = 0; i < kInputDim; ++i) {
    for (int j = 0; j < kStateDim; ++j) {
      t.header.push_back("K_" + std::to_string(i + 1) + "_" +
                         std::to_string(j + 1));
    }
  }
  for (int k = 0; k < gains.grid.count; ++k) {
    std::vector<double> row{gains.grid.time(k)};
    for (int i = 0; i < kInputDim; ++i) {
      for (int j = 0; j < kStateDim; ++j) row.push_back(gains.K[k](i, j));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

lqr::GainSchedule gains_from_table(const CsvTable& table) {
  check_width(table, 1 + kInputDim * kStateDim, "gain");
  lqr::GainSchedule g;
  g.grid = grid_of(table);
  for (const auto& row : table.rows) {
    Eigen::MatrixXd K(kInputDim, kStateDim);
    for (int i = 0; i < kInputDim; ++i) {
      for (int j = 0; j < kStateDim; ++j) K(i, j) = row[1 + i * kStateDim + j];
    }
    g.K.push_back(std::move(K));
  }
  return g;
}

lqr::GainSchedule tail_of(const lqr::GainSchedule& gains) {
  lqr::GainSchedule out;
  out.grid = gains.tail;
  out.K = gains.tail_K;
  return out;
}

CsvTable riccati_table(const lqr::RiccatiSolution& riccati) {
  CsvTable t;
  t.header.push_back("t_s");
  for (int i = 0; i < kStateDim; ++i) {
    for (int j = 0; j < kStateDim; ++j) {
      t.header.push_back("P_" + std::to_string(i + 1) + "_" +
                         std::to_string(j + 1));
    }
  }
  for (int k = 0; k < riccati.grid.count; ++k) {
    std::vector<double> row{riccati.grid.time(k)};
    for (int i = 0; i < kStateDim; ++i) {
      for (int j = 0; j < kStateDim; ++j) row.push_back(riccati.P[k](i, j));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void save_bundles(const std::filesystem::path& path, const std::string& key,
                  std::span<const reach::TrajectoryBundle> bundles) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kBundleMagic, sizeof(kBundleMagic));
  put<std::uint64_t>(out, key.size());
  out.write(key.data(), static_cast<std::streamsize>(key.size()));
  const std::uint64_t n = bundles.size();
  const std::uint64_t count = n ? bundles[0].states.size() : 0;
  const std::uint64_t nx = n ? bundles[0].params.size() : 0;
  const std::uint64_t nstate = n && count ? bundles[0].states[0].size() : 0;
  put(out, n);
  put(out, count);
  put(out, nstate);
  put(out, nx);
  for (const auto& b : bundles) {
    put_matrix(out, b.params);
    for (std::size_t k = 0; k < count; ++k) {
      put_matrix(out, b.states[k]);
      put_matrix(out, b.sensitivities[k]);
    }
  }
  if (!out) throw IoError("failed while writing " + path.string());
}

bool load_bundles(const std::filesystem::path& path, const std::string& key,
                  std::vector<reach::TrajectoryBundle>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[sizeof(kBundleMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kBundleMagic, sizeof(magic)) != 0) {
    return false;
  }
  std::uint64_t key_size = 0;
  if (!get(in, key_size) || key_size != key.size()) return false;
  std::string stored(key_size, '\0');
  if (!in.read(stored.data(), static_cast<std::streamsize>(key_size)) ||
      stored != key) {
    return false;
  }
  std::uint64_t n = 0, count = 0, nstate = 0, np = 0;
  if (!get(in, n) || !get(in, count) || !get(in, nstate) || !get(in, np)) {
    return false;
  }
  std::vector<reach::TrajectoryBundle> bundles(n);
  for (auto& b : bundles) {
    Eigen::MatrixXd params(np, 1);
    if (!get_matrix(in, params)) return false;
    b.params = params;
    b.states.resize(count);
    b.sensitivities.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      Eigen::MatrixXd x(nstate, 1);
      Eigen::MatrixXd s(nstate, np);
      if (!get_matrix(in, x) || !get_matrix(in, s)) return false;
      b.states[k] = x;
      b.sensitivities[k] = std::move(s);
    }
  }
  out = std::move(bundles);
  return true;
}

}  // namespace stsreach::pipeline
