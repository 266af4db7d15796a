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
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "stsreach/errors.hpp"
#include "stsreach/reachability.hpp"
#include "stsreach/sampling.hpp"

namespace stsreach::reach {

double falsification_cost(const MatrixXd& s, const MatrixXd& lower,
                          const MatrixXd& upper) {
  const MatrixXd half_width = 0.5 * (upper - lower);
  const MatrixXd center = 0.5 * (upper + lower);
  return (half_width - (s - center).cwiseAbs()).minCoeff();
}

namespace {

struct Probe {
  VectorXd p;
  MatrixXd s;
  double cost;
};

class BudgetedObjective {
 public:
  BudgetedObjective(const SensitivityEvaluator& eval, const ParamBox& box,
                    const MatrixXd& lo, const MatrixXd& hi, int budget,
                    int& used)
      : eval_(eval), box_(box), lo_(lo), hi_(hi), budget_(budget), used_(used) {}

  bool exhausted() const { return used_ >= budget_; }

  Probe operator()(const VectorXd& raw) {
    const VectorXd p = raw.cwiseMax(box_.lower).cwiseMin(box_.upper);
    ++used_;
    MatrixXd s = eval_(p);
    const double c = falsification_cost(s, lo_, hi_);
    return Probe{p, std::move(s), std::isfinite(c) ? c : 0.0};
  }

 private:
  const SensitivityEvaluator& eval_;
  const ParamBox& box_;
  const MatrixXd& lo_;
  const MatrixXd& hi_;
  int budget_;
  int& used_;
};

// Nelder-Mead on the box-projected objective. Returns the best probe.
Probe nelder_mead(BudgetedObjective& objective, const ParamBox& box,
                  const VectorXd& start, const VectorXd& scale,
                  int max_iterations) {
  const int n = static_cast<int>(start.size());
  std::vector<Probe> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(objective(start));
  for (int j = 0; j < n && !objective.exhausted(); ++j) {
    VectorXd v = start;
    // Step toward the side of the box with more room.
    v[j] += start[j] + scale[j] <= box.upper[j] ? scale[j] : -scale[j];
    simplex.push_back(objective(v));
  }
  auto by_cost = [](const Probe& a, const Probe& b) { return a.cost < b.cost; };

  for (int it = 0; it < max_iterations && !objective.exhausted() &&
                   static_cast<int>(simplex.size()) == n + 1;
       ++it) {
    std::sort(simplex.begin(), simplex.end(), by_cost);
    const double spread = simplex.back().cost - simplex.front().cost;
    double size = 0.0;
    for (int i = 1; i <= n; ++i) {
      size = std::max(size, ((simplex[i].p - simplex[0].p).array() /
                             scale.array().max(1e-300))
                                .abs()
                                .maxCoeff());
    }
    if (spread <= 1e-14 * (1.0 + std::abs(simplex.front().cost)) &&
        size <= 1e-10) {
      break;
    }
    if (size <= 1e-12) break;

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i].p;
    centroid /= n;
    const VectorXd& worst = simplex[n].p;

    Probe reflected = objective(centroid + (centroid - worst));
    if (reflected.cost < simplex[0].cost) {
      Probe expanded = objective(centroid + 2.0 * (centroid - worst));
      simplex[n] = expanded.cost < reflected.cost ? std::move(expanded)
                                                  : std::move(reflected);
    } else if (reflected.cost < simplex[n - 1].cost) {
      simplex[n] = std::move(reflected);
    } else {
      const bool outside = reflected.cost < simplex[n].cost;
      Probe contracted =
          outside ? objective(centroid + 0.5 * (centroid - worst))
                  : objective(centroid - 0.5 * (centroid - worst));
      const double ref_cost = outside ? reflected.cost : simplex[n].cost;
      if (contracted.cost <= ref_cost) {
        simplex[n] = std::move(contracted);
      } else {
        for (int i = 1; i <= n && !objective.exhausted(); ++i) {
          simplex[i] =
              objective(simplex[0].p + 0.5 * (simplex[i].p - simplex[0].p));
        }
      }
    }
  }
  return *std::min_element(simplex.begin(), simplex.end(), by_cost);
}

}  // namespace

FalsificationResult falsify_bounds(const MatrixXd& lower,
                                   const MatrixXd& upper, const ParamBox& box,
                                   const SensitivityEvaluator& evaluator,
                                   const FalsificationOptions& options) {
  box.validate();
  if (lower.rows() != upper.rows() || lower.cols() != upper.cols()) {
    throw ValidationError("falsification bounds have mismatched shapes");
  }
  FalsificationResult result;
  result.lower = lower;
  result.upper = upper;

  const VectorXd width = box.upper - box.lower;
  const VectorXd scale = options.initial_simplex * width;
  // Starts: the box center followed by a Latin hypercube design.
  std::vector<VectorXd> starts{box.center()};
  if (options.starts > 1) {
    for (auto& p : latin_hypercube(options.starts - 1, box, options.seed)) {
      starts.push_back(std::move(p));
    }
  }

  while (true) {
    ++result.iterations;
    BudgetedObjective objective(evaluator, box, result.lower, result.upper,
                                options.max_evaluations, result.evaluations);
    Probe best{VectorXd(), MatrixXd(), std::numeric_limits<double>::infinity()};
    for (const VectorXd& start : starts) {
      if (objective.exhausted()) break;
      Probe found =
          nelder_mead(objective, box, start, scale,
                      options.max_iterations_per_start);
      if (found.cost < best.cost) best = std::move(found);
    }
    if (!std::isfinite(best.cost)) {
      result.budget_exhausted = true;
      return result;
    }
    result.cost = best.cost;
    if (best.cost >= 0.0) return result;

    result.lower = result.lower.cwiseMin(best.s);
    result.upper = result.upper.cwiseMax(best.s);
    ++result.updates;
    if (objective.exhausted()) {
      result.budget_exhausted = true;
      return result;
    }
  }
}

}  // namespace stsreach::reach
