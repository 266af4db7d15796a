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
#include "stsreach/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stsreach/errors.hpp"
#include "stsreach/numeric_diff.hpp"
#include "stsreach/ode.hpp"
#include "stsreach/parallel.hpp"

namespace stsreach::reach {

void ParamBox::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw ValidationError("parameter box bounds must have equal, nonzero size");
  }
  if (lower.size() > 32) {
    throw ValidationError("parameter box supports at most 32 coordinates");
  }
  for (int j = 0; j < dim(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) ||
        !(lower[j] > 0.0)) {
      throw ValidationError("parameter box coordinate " + std::to_string(j) +
                            " must be finite and > 0");
    }
    if (lower[j] > upper[j]) {
      throw ValidationError("parameter box coordinate " + std::to_string(j) +
                            ": lower " + std::to_string(lower[j]) +
                            " > upper " + std::to_string(upper[j]));
    }
  }
}

bool ParamBox::contains(const VectorXd& p) const {
  return p.size() == lower.size() && (p.array() >= lower.array()).all() &&
         (p.array() <= upper.array()).all();
}

VectorXd ParamBox::vertex(VertexSignature signature) const {
  VectorXd v(dim());
  for (int j = 0; j < dim(); ++j) {
    v[j] = (signature >> j) & 1u ? upper[j] : lower[j];
  }
  return v;
}

namespace {

void check_finite(const MatrixXd& m, double t) {
  if (!m.allFinite()) {
    throw IntegrationFailure("non-finite state at t=" + std::to_string(t) +
                             " s");
  }
}

// Runs a fixed-step RK4 over the output grid, reporting each output sample.
template <typename State, typename Rhs, typename Sink>
void integrate(const Rhs& rhs, State y, const FlowGrid& grid, int last,
               Sink&& sink) {
  const double h = grid.inner_step();
  auto step = [&](double t, double dt) {
    try {
      y = rk4_step(rhs, t, y, dt);
    } catch (const IntegrationFailure&) {
      throw;
    } catch (const Error& e) {
      throw IntegrationFailure("at t=" + std::to_string(t) + " s: " + e.what());
    }
    check_finite(y, t + dt);
  };
  const int fine = std::clamp(grid.fine_steps, 0, grid.substeps);
  const int factor = std::max(grid.fine_factor, 1);
  sink(0, y);
  for (int k = 1; k <= last; ++k) {
    const double start = grid.time(k - 1);
    const int coarse =
        k == grid.count - 1 ? grid.substeps - fine : grid.substeps;
    for (int s = 0; s < coarse; ++s) step(start + s * h, h);
    for (int s = coarse; s < grid.substeps; ++s) {
      const double hf = h / factor;
      for (int j = 0; j < factor; ++j) step(start + s * h + j * hf, hf);
    }
    sink(k, y);
  }
}

}  // namespace

Trajectory flow(const ParametricSystem& sys, const VectorXd& p,
                const VectorXd& x0, const FlowGrid& grid) {
  Trajectory out(grid.count);
  auto rhs = [&](double t, const VectorXd& x) -> VectorXd {
    return sys.rhs(t, x, p);
  };
  integrate(rhs, x0, grid, grid.count - 1,
            [&](int k, const VectorXd& x) { out[k] = x; });
  return out;
}

TrajectoryBundle augmented_flow(const ParametricSystem& sys,
                                const VectorXd& p, const VectorXd& x0,
                                const FlowGrid& grid, int last_index) {
  const int n = sys.state_dim;
  const int np = sys.param_dim;
  const int last = last_index < 0 ? grid.count - 1
                                  : std::min(last_index, grid.count - 1);

  // Packed state [x | S].
  auto rhs = [&](double t, const MatrixXd& z) -> MatrixXd {
    const VectorXd x = z.col(0);
    const MatrixXd jx = central_jacobian<Eigen::Dynamic>(
        [&](const VectorXd& xs) { return sys.rhs(t, xs, p); }, x, n);
    const MatrixXd jp = central_jacobian<Eigen::Dynamic>(
        [&](const VectorXd& ps) { return sys.rhs(t, x, ps); }, p, n);
    MatrixXd dz(n, 1 + np);
    dz.col(0) = sys.rhs(t, x, p);
    dz.rightCols(np) = jx * z.rightCols(np) + jp;
    return dz;
  };

  MatrixXd z0 = MatrixXd::Zero(n, 1 + np);
  z0.col(0) = x0;
  TrajectoryBundle bundle;
  bundle.params = p;
  bundle.states.resize(last + 1);
  bundle.sensitivities.resize(last + 1);
  integrate(rhs, z0, grid, last, [&](int k, const MatrixXd& z) {
    bundle.states[k] = z.col(0);
    bundle.sensitivities[k] = z.rightCols(np);
  });
  return bundle;
}

SensitivityBounds sample_sensitivity_bounds(
    std::span<const TrajectoryBundle> bundles, const StaticMap& map,
    int workers) {
  if (bundles.empty()) throw ValidationError("no bundles to bound");
  const std::size_t count = bundles.front().states.size();
  for (const auto& b : bundles) {
    if (b.states.size() != count || b.sensitivities.size() != count) {
      throw GridMismatch("bundles do not share the same time grid");
    }
  }
  SensitivityBounds out;
  out.lower.resize(count);
  out.upper.resize(count);
  parallel_for(static_cast<int>(count), workers, [&](int k) {
    MatrixXd lo, hi;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      const auto& b = bundles[i];
      const MatrixXd s =
          map.sensitivity(k, b.states[k], b.params, b.sensitivities[k]);
      if (i == 0) {
        lo = s;
        hi = s;
      } else {
        lo = lo.cwiseMin(s);
        hi = hi.cwiseMax(s);
      }
    }
    out.lower[k] = std::move(lo);
    out.upper[k] = std::move(hi);
  });
  return out;
}

std::vector<RowVertices> select_vertices(const MatrixXd& lower,
                                         const MatrixXd& upper) {
  std::vector<RowVertices> rows(lower.rows());
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    RowVertices& r = rows[i];
    r.lower_vertex = 0;
    r.upper_vertex = 0;
    r.compensation.resize(lower.cols());
    for (Eigen::Index j = 0; j < lower.cols(); ++j) {
      const double center = 0.5 * (lower(i, j) + upper(i, j));
      const VertexSignature bit = VertexSignature{1} << j;
      if (center >= 0.0) {
        r.upper_vertex |= bit;
        r.compensation[j] = std::min(0.0, lower(i, j));
      } else {
        r.lower_vertex |= bit;
        r.compensation[j] = std::max(0.0, upper(i, j));
      }
    }
  }
  return rows;
}

VertexFlowCache::VertexFlowCache(ParametricSystem sys, VectorXd x0,
                                 FlowGrid grid, ParamBox box)
    : sys_(std::move(sys)),
      x0_(std::move(x0)),
      grid_(grid),
      box_(std::move(box)) {}

void VertexFlowCache::prepare(const std::set<VertexSignature>& signatures,
                              int workers) {
  std::vector<VertexSignature> missing;
  for (const VertexSignature s : signatures) {
    if (!cache_.contains(s)) missing.push_back(s);
  }
  std::vector<Trajectory> results(missing.size());
  parallel_for(static_cast<int>(missing.size()), workers, [&](int i) {
    results[i] = flow(sys_, box_.vertex(missing[i]), x0_, grid_);
  });
  for (std::size_t i = 0; i < missing.size(); ++i) {
    cache_.emplace(missing[i], std::move(results[i]));
  }
}

const Trajectory& VertexFlowCache::trajectory(VertexSignature s) const {
  const auto it = cache_.find(s);
  if (it == cache_.end()) {
    throw Error("vertex " + std::to_string(s) + " was not prepared");
  }
  return it->second;
}

std::set<VertexSignature> required_vertices(const SensitivityBounds& bounds) {
  std::set<VertexSignature> out;
  for (int k = 0; k < bounds.count(); ++k) {
    for (const RowVertices& r :
         select_vertices(bounds.lower[k], bounds.upper[k])) {
      out.insert(r.lower_vertex);
      out.insert(r.upper_vertex);
    }
  }
  return out;
}

ReachBox over_approximate(const SensitivityBounds& bounds,
                          const StaticMap& map, VertexFlowCache& cache,
                          int workers) {
  const int count = bounds.count();
  if (count > cache.grid().count) {
    throw GridMismatch("bounds extend past the flow grid");
  }
  cache.prepare(required_vertices(bounds), workers);
  const ParamBox& box = cache.box();

  ReachBox out;
  out.lower.resize(count);
  out.upper.resize(count);
  parallel_for(count, workers, [&](int k) {
    const auto rows = select_vertices(bounds.lower[k], bounds.upper[k]);
    std::map<VertexSignature, VectorXd> values;
    auto psi = [&](VertexSignature s) -> const VectorXd& {
      auto it = values.find(s);
      if (it == values.end()) {
        it = values
                 .emplace(s, map.value(k, cache.trajectory(s)[k],
                                       box.vertex(s)))
                 .first;
      }
      return it->second;
    };
    VectorXd lo(map.dim()), hi(map.dim());
    for (int i = 0; i < map.dim(); ++i) {
      const RowVertices& r = rows[i];
      const VectorXd delta = box.vertex(r.lower_vertex) - box.vertex(r.upper_vertex);
      const double widen = r.compensation.dot(delta);
      lo[i] = psi(r.lower_vertex)[i] - widen;
      hi[i] = psi(r.upper_vertex)[i] + widen;
    }
    out.lower[k] = std::move(lo);
    out.upper[k] = std::move(hi);
  });
  return out;
}

Trajectory map_trajectory(const StaticMap& map, const Trajectory& states,
                          const VectorXd& p) {
  Trajectory out(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    out[k] = map.value(static_cast<int>(k), states[k], p);
  }
  return out;
}

ContainmentReport containment_check(const ReachBox& reach,
                                    std::span<const Trajectory> trajectories) {
  ContainmentReport report;
  for (std::size_t s = 0; s < trajectories.size(); ++s) {
    const Trajectory& traj = trajectories[s];
    if (static_cast<int>(traj.size()) != reach.count()) {
      throw GridMismatch("trajectory length differs from reach box");
    }
    for (int k = 0; k < reach.count(); ++k) {
      for (Eigen::Index i = 0; i < traj[k].size(); ++i) {
        const double v = traj[k][i];
        const double margin =
            std::min(v - reach.lower[k][i], reach.upper[k][i] - v);
        ++report.checked;
        if (margin >= 0.0) {
          ++report.inside;
        } else {
          report.violations.push_back(Violation{static_cast<int>(s), k,
                                                static_cast<int>(i), v,
                                                margin});
        }
      }
    }
  }
  return report;
}

}  // namespace stsreach::reach
