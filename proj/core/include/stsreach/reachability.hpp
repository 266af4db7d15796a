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
#ifndef STSREACH_REACHABILITY_HPP_
#define STSREACH_REACHABILITY_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Dense>

/// Sensitivity-based interval over-approximation of the reachable set of
/// dx/dt = phi(t, x, p) from a single initial state, for a constant
/// parameter p in a box, and of static maps y = psi(t, x, p) of its
/// trajectories.
namespace stsreach::reach {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Bit j set means coordinate j sits at its upper bound.
using VertexSignature = std::uint32_t;

struct ParamBox {
  VectorXd lower;
  VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  /// Throws ValidationError (naming the coordinate) unless
  /// 0 < lower <= upper holds coordinate-wise.
  void validate() const;
  bool contains(const VectorXd& p) const;
  VectorXd vertex(VertexSignature signature) const;
  VectorXd center() const { return 0.5 * (lower + upper); }
};

/// Output samples t_k = t0 + k * step, each reached by `substeps` fixed RK4
/// steps from the previous one.
struct FlowGrid {
  double t0 = 0.0;
  double step = 0.0;
  int substeps = 1;
  int count = 0;

  // The last fine_steps inner steps of the horizon are each split into
  // fine_factor RK4 steps, for dynamics that stiffen at the end.
  int fine_steps = 0;
  int fine_factor = 1;

  double time(int k) const { return t0 + k * step; }
  double inner_step() const { return step / substeps; }
};

struct ParametricSystem {
  int state_dim = 0;
  int param_dim = 0;
  std::function<VectorXd(double, const VectorXd&, const VectorXd&)> rhs;
};

/// States on the output samples of a FlowGrid.
using Trajectory = std::vector<VectorXd>;

/// One parameter's trajectory and its sensitivity S = dPhi/dp.
struct TrajectoryBundle {
  VectorXd params;
  Trajectory states;
  std::vector<MatrixXd> sensitivities;
};

/// Integrates the system alone. Throws IntegrationFailure on non-finite
/// states or on errors raised by the right-hand side.
Trajectory flow(const ParametricSystem& sys, const VectorXd& p,
                const VectorXd& x0, const FlowGrid& grid);

/// Integrates the state jointly with dS/dt = (dphi/dx) S + dphi/dp, S(t0) = 0.
/// Both Jacobians are central differences of sys.rhs. When last_index is
/// non-negative, integration stops after that output sample.
TrajectoryBundle augmented_flow(const ParametricSystem& sys,
                                const VectorXd& p, const VectorXd& x0,
                                const FlowGrid& grid, int last_index = -1);

/// A static map psi(k, x, p) of the state at output sample k, with its
/// sensitivity chain rule dpsi/dx * S + dpsi/dp.
class StaticMap {
 public:
  virtual ~StaticMap() = default;
  virtual int dim() const = 0;
  virtual VectorXd value(int k, const VectorXd& x, const VectorXd& p) const = 0;
  virtual MatrixXd sensitivity(int k, const VectorXd& x, const VectorXd& p,
                               const MatrixXd& state_sensitivity) const = 0;
};

/// psi = x.
class StateMap final : public StaticMap {
 public:
  explicit StateMap(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  VectorXd value(int, const VectorXd& x, const VectorXd&) const override {
    return x;
  }
  MatrixXd sensitivity(int, const VectorXd&, const VectorXd&,
                       const MatrixXd& s) const override {
    return s;
  }

 private:
  int dim_;
};

/// Elementwise sensitivity envelopes per output sample.
struct SensitivityBounds {
  std::vector<MatrixXd> lower;
  std::vector<MatrixXd> upper;

  int count() const { return static_cast<int>(lower.size()); }
};

/// Maps every bundle through `map` and keeps the elementwise min/max at
/// each sample. Throws GridMismatch when bundles differ in length.
SensitivityBounds sample_sensitivity_bounds(
    std::span<const TrajectoryBundle> bundles, const StaticMap& map,
    int workers = 1);

/// Per-row vertex choice and compensation for one sample.
struct RowVertices {
  VertexSignature lower_vertex;
  VertexSignature upper_vertex;
  Eigen::RowVectorXd compensation;  // d
};

/// Picks the vertices from the sign of each bound center (center 0 counts
/// as non-negative) along with the compensation row d.
std::vector<RowVertices> select_vertices(const MatrixXd& lower,
                                         const MatrixXd& upper);

/// Vertex trajectories of the system, integrated once per distinct vertex
/// over the whole horizon.
class VertexFlowCache {
 public:
  VertexFlowCache(ParametricSystem sys, VectorXd x0, FlowGrid grid,
                  ParamBox box);

  /// Integrates all missing vertices in parallel.
  void prepare(const std::set<VertexSignature>& signatures, int workers);
  const Trajectory& trajectory(VertexSignature signature) const;
  std::size_t size() const { return cache_.size(); }
  const ParamBox& box() const { return box_; }
  const FlowGrid& grid() const { return grid_; }

 private:
  ParametricSystem sys_;
  VectorXd x0_;
  FlowGrid grid_;
  ParamBox box_;
  std::map<VertexSignature, Trajectory> cache_;
};

/// Every vertex signature that over_approximate will query.
std::set<VertexSignature> required_vertices(const SensitivityBounds& bounds);

struct ReachBox {
  std::vector<VectorXd> lower;
  std::vector<VectorXd> upper;

  int count() const { return static_cast<int>(lower.size()); }
};

/// Interval over-approximation built from sensitivity bounds:
///   r_lo_i = psi_i(pi_lo^i) - d^i (pi_lo^i - pi_hi^i)
///   r_hi_i = psi_i(pi_hi^i) + d^i (pi_lo^i - pi_hi^i).
/// The cache is prepared here with the vertices the bounds require.
ReachBox over_approximate(const SensitivityBounds& bounds,
                          const StaticMap& map, VertexFlowCache& cache,
                          int workers = 1);

/// Applies a static map to a trajectory integrated with parameter p.
Trajectory map_trajectory(const StaticMap& map, const Trajectory& states,
                          const VectorXd& p);

struct Violation {
  int sample;
  int time_index;
  int coordinate;
  double value;
  double margin;  // min(value - lower, upper - value); negative when outside
};

struct ContainmentReport {
  std::size_t checked = 0;
  std::size_t inside = 0;
  std::vector<Violation> violations;

  double fraction() const {
    return checked == 0 ? 1.0 : static_cast<double>(inside) / checked;
  }
};

/// Counts (sample, time, coordinate) triples inside the box, with no
/// tolerance on the comparison.
ContainmentReport containment_check(const ReachBox& reach,
                                    std::span<const Trajectory> trajectories);

// --- falsification -------------------------------------------------------

/// The bound falsification cost
///   min_ij ( (hi_ij - lo_ij)/2 - |s_ij - (lo_ij + hi_ij)/2| ),
/// negative iff some entry of s falls outside [lo, hi].
double falsification_cost(const MatrixXd& s, const MatrixXd& lower,
                          const MatrixXd& upper);

using SensitivityEvaluator = std::function<MatrixXd(const VectorXd&)>;

struct FalsificationOptions {
  int starts = 8;
  int max_evaluations = 2000;  // per call, across all rounds and starts
  int max_iterations_per_start = 200;
  double initial_simplex = 0.25;  // fraction of each box width
  std::uint64_t seed = 1;
};

struct FalsificationResult {
  MatrixXd lower;
  MatrixXd upper;
  double cost = 0.0;  // last J_F found
  int iterations = 0;  // optimization rounds
  int evaluations = 0;
  int updates = 0;  // rounds that enlarged the bounds
  bool budget_exhausted = false;
};

/// Searches the box for parameters whose sensitivity escapes the bounds by
/// minimizing falsification_cost with a multistart Nelder-Mead simplex.
/// Each negative minimum enlarges the violated entries and the search
/// repeats until the cost is non-negative or the evaluation budget runs out
/// (then budget_exhausted is set and the best bounds so far are returned).
/// Local search only: a non-negative result is not a proof.
FalsificationResult falsify_bounds(const MatrixXd& lower,
                                   const MatrixXd& upper, const ParamBox& box,
                                   const SensitivityEvaluator& evaluator,
                                   const FalsificationOptions& options = {});

}  // namespace stsreach::reach

#endif  // STSREACH_REACHABILITY_HPP_
