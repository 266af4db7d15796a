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
#include "stsreach/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "stsreach/errors.hpp"
#include "stsreach/robot_spaces.hpp"

namespace stsreach::pipeline {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kStateKeys[kStateDim] = {
    "theta1_deg",          "theta2_deg",          "theta3_deg",
    "theta1dot_deg_per_s", "theta2dot_deg_per_s", "theta3dot_deg_per_s"};
constexpr const char* kInputKeys[kInputDim] = {"tau_h_Nm", "tau_s_Nm",
                                               "F_x_N", "F_y_N"};

std::string param_key(int j) {
  return std::string(kParamNames[j]) + "_" + std::string(kParamUnits[j]);
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>* notices) : notices_(notices) {}

  void notice(const std::string& path) {
    if (notices_) notices_->push_back("using default for " + path);
  }

  void reject_unknown(const Json& obj, const std::vector<std::string>& known,
                      const std::string& where) {
    if (!obj.is_object()) {
      throw ParseError(where.empty() ? "scenario must be a JSON object"
                                     : where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ParseError("unknown key '" + join(where, key) + "'");
      }
    }
  }

  static std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }

  template <typename T>
  void read(const Json& obj, const std::string& where, const std::string& key,
            T& out) {
    if (!obj.contains(key)) {
      notice(join(where, key));
      return;
    }
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("field '" + join(where, key) + "' has the wrong type");
    }
  }

  void read_optional_bound(const Json& obj, const std::string& where,
                           const std::string& key, std::optional<double>& out) {
    if (!obj.contains(key)) {
      notice(join(where, key));
      return;
    }
    const Json& v = obj.at(key);
    if (v.is_null()) {
      out.reset();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw ParseError("field '" + join(where, key) +
                       "' must be a number or null");
    }
  }

  void read_diag(const Json& obj, const std::string& where,
                 const std::string& key, Eigen::MatrixXd& out) {
    if (!obj.contains(key)) {
      notice(join(where, key));
      return;
    }
    std::vector<double> v;
    read(obj, where, key, v);
    if (static_cast<Eigen::Index>(v.size()) != out.rows()) {
      throw ValidationError("field '" + join(where, key) + "' needs " +
                            std::to_string(out.rows()) + " entries");
    }
    out = Eigen::Map<Eigen::VectorXd>(v.data(), v.size()).asDiagonal();
  }

  void read_params(const Json& root, const std::string& key,
                   Eigen::Ref<Eigen::VectorXd> out) {
    if (!root.contains(key)) {
      notice(key);
      return;
    }
    std::vector<std::string> known;
    for (int j = 0; j < kNumParams; ++j) known.push_back(param_key(j));
    const Json& obj = root.at(key);
    reject_unknown(obj, known, key);
    for (int j = 0; j < kNumParams; ++j) read(obj, key, known[j], out[j]);
  }

 private:
  std::vector<std::string>* notices_;
};

Json params_json(const Eigen::VectorXd& v) {
  Json obj = Json::object();
  for (int j = 0; j < kNumParams; ++j) obj[param_key(j)] = v[j];
  return obj;
}

Json diag_json(const Eigen::MatrixXd& m) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) arr.push_back(m(i, i));
  return arr;
}

Json bound_json(const std::array<std::optional<double>, kInputDim>& b) {
  Json obj = Json::object();
  for (int i = 0; i < kInputDim; ++i) {
    obj[kInputKeys[i]] = b[i] ? Json(*b[i]) : Json(nullptr);
  }
  return obj;
}

Json z_json(const planning::ZVector& z) {
  Json obj = Json::object();
  obj["theta2_deg"] = rad_to_deg(z[0]);
  obj["x_com_m"] = z[1];
  obj["y_com_m"] = z[2];
  return obj;
}

Json to_json(const Scenario& s) {
  Json root = Json::object();
  root["t0_s"] = s.t0;
  root["tf_s"] = s.tf;
  root["grid_hz"] = s.grid_hz;
  root["max_step_s"] = s.max_step;
  root["terminal_refinement"] = {{"span_s", s.tail_span},
                                 {"rk4_step_s", s.tail_step}};
  Json x0 = Json::object();
  for (int i = 0; i < kStateDim; ++i) x0[kStateKeys[i]] = rad_to_deg(s.x0[i]);
  root["x0"] = x0;
  root["p_nominal"] = params_json(s.p_nominal.values);
  root["p_lower"] = params_json(s.box.lower);
  root["p_upper"] = params_json(s.box.upper);
  root["z_initial"] = s.z_initial ? z_json(*s.z_initial) : Json(nullptr);
  root["z_final"] = z_json(s.z_final);
  Json alloc = Json::object();
  alloc["weights"] = Json::array();
  for (int i = 0; i < kInputDim; ++i) {
    Json row = Json::array();
    for (int j = 0; j < kInputDim; ++j) row.push_back(s.allocation.weights(i, j));
    alloc["weights"].push_back(row);
  }
  alloc["lower"] = bound_json(s.allocation.lower);
  alloc["upper"] = bound_json(s.allocation.upper);
  root["allocation"] = alloc;
  Json lqr = Json::object();
  lqr["Q_diag"] = diag_json(s.weights.Q);
  lqr["R_diag"] = diag_json(s.weights.R);
  lqr["S_diag"] = diag_json(s.weights.S);
  lqr["riccati_ceiling"] = s.riccati_ceiling;
  root["lqr"] = lqr;
  Json sampling = Json::object();
  sampling["n_bounds"] = s.n_bounds;
  sampling["n_validate"] = s.n_validate;
  sampling["seed_bounds"] = s.seed_bounds;
  sampling["seed_validate"] = s.seed_validate;
  root["sampling"] = sampling;
  Json fals = Json::object();
  fals["enabled"] = s.falsification.enabled;
  fals["leading_samples"] = s.falsification.leading_samples;
  fals["max_evaluations"] = s.falsification.max_evaluations;
  fals["starts"] = s.falsification.starts;
  fals["seed"] = s.falsification.seed;
  root["falsification"] = fals;
  root["workers"] = s.workers;
  return root;
}

planning::ZVector read_z(Reader& r, const Json& obj, const std::string& where,
                         planning::ZVector z) {
  r.reject_unknown(obj, {"theta2_deg", "x_com_m", "y_com_m"}, where);
  double theta2_deg = rad_to_deg(z[0]);
  r.read(obj, where, "theta2_deg", theta2_deg);
  r.read(obj, where, "x_com_m", z[1]);
  r.read(obj, where, "y_com_m", z[2]);
  z[0] = deg_to_rad(theta2_deg);
  return z;
}

}  // namespace

Scenario Scenario::defaults() {
  Scenario s;
  s.x0 << deg_to_rad(90.0), deg_to_rad(-90.0), deg_to_rad(90.0), 0.0, 0.0,
      0.0;
  s.p_nominal = ParamVector::nominal();
  s.box = sts::sit_to_stand_box();
  s.z_final = planning::ZVector(deg_to_rad(-5.0), 0.0, 0.974);
  s.allocation = allocation::AllocationSpec::sit_to_stand();
  s.weights = lqr::WeightSet::sit_to_stand();
  return s;
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0)) {
    fail("tf_s must exceed t0_s");
  }
  if (!(grid_hz > 0.0) || !std::isfinite(grid_hz)) fail("grid_hz must be > 0");
  const double samples = (tf - t0) * grid_hz;
  if (std::abs(samples - std::round(samples)) > 1e-9 * std::max(1.0, samples)) {
    fail("grid_hz must divide the horizon tf_s - t0_s into whole samples");
  }
  if (!(max_step > 0.0) || !std::isfinite(max_step)) {
    fail("max_step_s must be > 0");
  }
  if (!(tail_span >= 0.0) || !std::isfinite(tail_span)) {
    fail("terminal_refinement.span_s must be >= 0");
  }
  if (tail_span > 0.0 && !(tail_step > 0.0 && tail_step <= max_step)) {
    fail("terminal_refinement.rk4_step_s must lie in (0, max_step_s]");
  }
  if (!x0.allFinite()) fail("x0 must be finite");
  try {
    p_nominal.validate();
  } catch (const ValidationError& e) {
    fail(std::string("p_nominal: ") + e.what());
  }
  if (box.lower.size() != kNumParams || box.upper.size() != kNumParams) {
    fail("p_lower/p_upper need 12 entries");
  }
  for (int j = 0; j < kNumParams; ++j) {
    const std::string key = param_key(j);
    if (!(box.lower[j] > 0.0) || !std::isfinite(box.upper[j])) {
      fail("p_lower." + key + " must be > 0 and p_upper." + key +
           " finite");
    }
    if (box.lower[j] > box.upper[j]) {
      fail("p_lower." + key + " (" + std::to_string(box.lower[j]) +
           ") exceeds p_upper." + key + " (" + std::to_string(box.upper[j]) +
           ")");
    }
  }
  if (!z_final.allFinite() || (z_initial && !z_initial->allFinite())) {
    fail("z boundary values must be finite");
  }
  try {
    allocation.validate();
  } catch (const ValidationError& e) {
    fail(std::string("allocation: ") + e.what());
  }
  try {
    weights.validate();
  } catch (const ValidationError& e) {
    fail(std::string("lqr: ") + e.what());
  }
  if (weights.Q.rows() != kStateDim || weights.R.rows() != kInputDim) {
    fail("lqr: Q/S need 6 and R needs 4 diagonal entries");
  }
  if (n_bounds < 1) fail("sampling.n_bounds must be >= 1");
  if (n_validate < 0) fail("sampling.n_validate must be >= 0");
  if (falsification.leading_samples < 0 || falsification.max_evaluations < 1 ||
      falsification.starts < 1) {
    fail("falsification settings must be positive");
  }
  if (workers < 0) fail("workers must be >= 0");
  if (!(riccati_ceiling > 0.0)) fail("lqr.riccati_ceiling must be > 0");
}

planning::ZBoundary Scenario::boundary() const {
  return planning::ZBoundary{
      z_initial ? *z_initial : planning::z_of(angles(x0), p_nominal), z_final};
}

int Scenario::substeps() const {
  return static_cast<int>(std::ceil(output_step() / max_step - 1e-9));
}

namespace {

struct Refinement {
  int fine_steps;
  int fine_factor;
};

Refinement refinement(const Scenario& s) {
  if (!(s.tail_span > 0.0)) return {0, 1};
  const double h = s.output_step() / s.substeps();
  const int steps = std::min(
      static_cast<int>(std::ceil(s.tail_span / h - 1e-9)), s.substeps());
  const int factor =
      std::max(1, static_cast<int>(std::ceil(h / s.tail_step - 1e-9)));
  return {steps, factor};
}

}  // namespace

TimeGrid Scenario::tail_grid() const {
  const Refinement r = refinement(*this);
  if (r.fine_steps == 0) return TimeGrid{};
  const TimeGrid design = design_grid();
  const int fine_intervals = 2 * r.fine_steps * r.fine_factor;
  return TimeGrid{design.time(design.count - 1 - 2 * r.fine_steps),
                  design.step / r.fine_factor, fine_intervals + 1};
}

TimeGrid Scenario::design_grid() const {
  const int intervals = static_cast<int>(std::round((tf - t0) * grid_hz)) *
                        substeps() * 2;
  return TimeGrid{t0, (tf - t0) / intervals, intervals + 1};
}

reach::FlowGrid Scenario::flow_grid() const {
  const int intervals = static_cast<int>(std::round((tf - t0) * grid_hz));
  const Refinement r = refinement(*this);
  return reach::FlowGrid{t0,           (tf - t0) / intervals, substeps(),
                         intervals + 1, r.fine_steps,          r.fine_factor};
}

Scenario parse_scenario(std::string_view text,
                        std::vector<std::string>* notices) {
  Json root;
  const bool blank =
      text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (blank) {
    root = Json::object();
  } else {
    try {
      root = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
  }

  Reader r(notices);
  Scenario s = Scenario::defaults();
  r.reject_unknown(root,
                   {"t0_s", "tf_s", "grid_hz", "max_step_s",
                    "terminal_refinement", "x0", "p_nominal",
                    "p_lower", "p_upper", "z_initial", "z_final", "allocation",
                    "lqr", "sampling", "falsification", "workers"},
                   "");
  r.read(root, "", "t0_s", s.t0);
  r.read(root, "", "tf_s", s.tf);
  r.read(root, "", "grid_hz", s.grid_hz);
  r.read(root, "", "max_step_s", s.max_step);
  if (root.contains("terminal_refinement")) {
    const Json& tr = root.at("terminal_refinement");
    r.reject_unknown(tr, {"span_s", "rk4_step_s"}, "terminal_refinement");
    r.read(tr, "terminal_refinement", "span_s", s.tail_span);
    r.read(tr, "terminal_refinement", "rk4_step_s", s.tail_step);
  } else {
    r.notice("terminal_refinement");
  }

  if (root.contains("x0")) {
    const Json& x0 = root.at("x0");
    r.reject_unknown(x0, {kStateKeys, kStateKeys + kStateDim}, "x0");
    for (int i = 0; i < kStateDim; ++i) {
      double deg = rad_to_deg(s.x0[i]);
      r.read(x0, "x0", kStateKeys[i], deg);
      s.x0[i] = deg_to_rad(deg);
    }
  } else {
    r.notice("x0");
  }

  r.read_params(root, "p_nominal", s.p_nominal.values);
  r.read_params(root, "p_lower", s.box.lower);
  r.read_params(root, "p_upper", s.box.upper);

  if (root.contains("z_initial") && !root.at("z_initial").is_null()) {
    s.z_initial = read_z(r, root.at("z_initial"), "z_initial",
                         planning::z_of(angles(s.x0), s.p_nominal));
  }
  if (root.contains("z_final")) {
    s.z_final = read_z(r, root.at("z_final"), "z_final", s.z_final);
  } else {
    r.notice("z_final");
  }

  if (root.contains("allocation")) {
    const Json& a = root.at("allocation");
    r.reject_unknown(a, {"weights", "weights_diag", "lower", "upper"},
                     "allocation");
    if (a.contains("weights") && a.contains("weights_diag")) {
      throw ParseError("allocation: give either weights or weights_diag");
    }
    if (a.contains("weights")) {
      std::vector<std::vector<double>> w;
      r.read(a, "allocation", "weights", w);
      if (w.size() != kInputDim) {
        throw ValidationError("allocation.weights must be 4x4");
      }
      for (int i = 0; i < kInputDim; ++i) {
        if (w[i].size() != kInputDim) {
          throw ValidationError("allocation.weights must be 4x4");
        }
        for (int j = 0; j < kInputDim; ++j) s.allocation.weights(i, j) = w[i][j];
      }
    } else if (a.contains("weights_diag")) {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(kInputDim, kInputDim);
      r.read_diag(a, "allocation", "weights_diag", w);
      s.allocation.weights = w;
    } else {
      r.notice("allocation.weights");
    }
    for (const char* side : {"lower", "upper"}) {
      auto& bounds = std::string(side) == "lower" ? s.allocation.lower
                                                  : s.allocation.upper;
      const std::string where = std::string("allocation.") + side;
      if (!a.contains(side)) {
        r.notice(where);
        continue;
      }
      const Json& b = a.at(side);
      r.reject_unknown(b, {kInputKeys, kInputKeys + kInputDim}, where);
      for (int i = 0; i < kInputDim; ++i) {
        r.read_optional_bound(b, where, kInputKeys[i], bounds[i]);
      }
    }
  } else {
    r.notice("allocation");
  }

  if (root.contains("lqr")) {
    const Json& l = root.at("lqr");
    r.reject_unknown(l, {"Q_diag", "R_diag", "S_diag", "riccati_ceiling"},
                     "lqr");
    r.read_diag(l, "lqr", "Q_diag", s.weights.Q);
    r.read_diag(l, "lqr", "R_diag", s.weights.R);
    r.read_diag(l, "lqr", "S_diag", s.weights.S);
    r.read(l, "lqr", "riccati_ceiling", s.riccati_ceiling);
  } else {
    r.notice("lqr");
  }

  if (root.contains("sampling")) {
    const Json& sm = root.at("sampling");
    r.reject_unknown(sm, {"n_bounds", "n_validate", "seed_bounds",
                          "seed_validate"},
                     "sampling");
    r.read(sm, "sampling", "n_bounds", s.n_bounds);
    r.read(sm, "sampling", "n_validate", s.n_validate);
    r.read(sm, "sampling", "seed_bounds", s.seed_bounds);
    r.read(sm, "sampling", "seed_validate", s.seed_validate);
  } else {
    r.notice("sampling");
  }

  if (root.contains("falsification")) {
    const Json& f = root.at("falsification");
    r.reject_unknown(f, {"enabled", "leading_samples", "max_evaluations",
                         "starts", "seed"},
                     "falsification");
    r.read(f, "falsification", "enabled", s.falsification.enabled);
    r.read(f, "falsification", "leading_samples",
           s.falsification.leading_samples);
    r.read(f, "falsification", "max_evaluations",
           s.falsification.max_evaluations);
    r.read(f, "falsification", "starts", s.falsification.starts);
    r.read(f, "falsification", "seed", s.falsification.seed);
  } else {
    r.notice("falsification");
  }

  r.read(root, "", "workers", s.workers);
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::vector<std::string>* notices) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), notices);
}

std::string scenario_to_json(const Scenario& scenario) {
  return to_json(scenario).dump(2);
}

std::string config_hash(const Scenario& scenario) {
  Json j = to_json(scenario);
  j.erase("workers");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

}  // namespace stsreach::pipeline
