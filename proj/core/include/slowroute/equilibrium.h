// Copyright 2026 The slowroute Authors.
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

#ifndef SLOWROUTE_EQUILIBRIUM_H_
#define SLOWROUTE_EQUILIBRIUM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slowroute/network.h"
#include "slowroute/population.h"

namespace slowroute {

// How a class perceives path costs.
//   kSlowdown:         sum_e l_e(f_e) - gamma * beta * l_e(0)
//   kEmulatedAltruism: sum_e (1 + d*alpha) a_e f_e^d + b_e,
//                      alpha = BetaToAlpha(beta, gamma, d)
// Both induce the same Nash flows; the second exists so that the equivalence
// can be checked rather than assumed.
enum class CostMode { kSlowdown, kEmulatedAltruism };

std::string_view CostModeName(CostMode mode);

// A validated (problem, population, signal) triple plus the cost model used
// to evaluate it.
class PerceivedCostContext {
 public:
  // Throws kValidationError if the problem or profile is malformed. In
  // emulated-altruism mode additionally requires a uniform degree
  // (kPreconditionViolated) and gamma * beta < 1 for every class
  // (kSingularTransform).
  static PerceivedCostContext Create(RoutingProblem problem,
                                     SensitivityProfile profile,
                                     SignalPolicy signal,
                                     CostMode mode = CostMode::kSlowdown);

  const RoutingProblem& problem() const { return problem_; }
  const SensitivityProfile& profile() const { return profile_; }
  double gamma() const { return signal_.gamma; }
  CostMode mode() const { return mode_; }
  // Uniform edge degree, or 0 if degrees differ.
  int degree() const { return degree_; }
  // Altruism level of a class; only meaningful in emulated-altruism mode.
  double alpha(int commodity, int cls) const { return alpha_[commodity][cls]; }
  double beta(int commodity, int cls) const {
    return profile_.classes[commodity][cls].beta;
  }

 private:
  PerceivedCostContext() = default;

  RoutingProblem problem_;
  SensitivityProfile profile_;
  SignalPolicy signal_;
  CostMode mode_ = CostMode::kSlowdown;
  int degree_ = 0;
  std::vector<std::vector<double>> alpha_;
};

enum class StepRule { kExactLineSearch, kHarmonic };
enum class Initialization { kLowestIndexPath, kRandom };

struct SolverConfig {
  // Relative duality gap at which a solve counts as converged.
  double tolerance = 1e-9;
  int max_iterations = 200000;
  StepRule step_rule = StepRule::kExactLineSearch;
  // Interleave pairwise (away-step) moves between the Frank-Wolfe steps.
  bool pairwise_moves = true;
  Initialization initialization = Initialization::kLowestIndexPath;
  std::uint64_t seed = 0;
};

struct EquilibriumResult {
  FlowAssignment flow;
  double potential_value = 0.0;
  // Duality gap of the potential divided by |potential| + 1.
  double relative_gap = 0.0;
  int iterations = 0;
  double total_latency = 0.0;
  // [commodity][class] minimum perceived path cost at the returned flow.
  std::vector<std::vector<double>> per_class_min_cost;
  bool converged = false;

  // max(1, max |per-class minimum cost|); the unit the Wardrop tolerance is
  // measured in.
  double cost_scale = 1.0;
  // Tolerance to use with VerifyNash for this result.
  double wardrop_epsilon = 0.0;
  // Set when some edge has a = 0, so aggregate flows may not be unique.
  bool possibly_non_unique = false;
  std::vector<std::string> diagnostics;
};

double PerceivedCost(const PerceivedCostContext& context, int commodity,
                     int cls, int path, std::span<const double> edge_flows);

// Potential whose gradient in f^{c,k}_p is the perceived cost (slowdown mode),
// or the perceived cost divided by (1 + d*alpha_k) (emulated mode, where the
// game is a weighted potential game). Throws kInfeasibleFlow.
double Potential(const PerceivedCostContext& context,
                 const FlowAssignment& flow);

// Nash flow by convex minimization of Potential. Never throws for
// non-convergence: the best iterate is returned with converged = false.
EquilibriumResult SolveNash(const PerceivedCostContext& context,
                            const SolverConfig& config = {});
// Same, starting from `initial` (must be feasible for the context).
EquilibriumResult SolveNash(const PerceivedCostContext& context,
                            const SolverConfig& config,
                            const FlowAssignment& initial);

// Flow minimizing total latency. The result has one class per commodity and
// its per-class costs are marginal costs.
EquilibriumResult SolveOptimum(const RoutingProblem& problem,
                               const SolverConfig& config = {});

double DefaultWardropEpsilon(double relative_gap, double cost_scale);

struct Deviation {
  int commodity = 0;
  int cls = 0;
  int path = 0;
  double flow = 0.0;
  double cost = 0.0;
  double min_cost = 0.0;

  double excess() const { return cost - min_cost; }
};

struct DeviationReport {
  std::vector<Deviation> violations;

  bool ok() const { return violations.empty(); }
  double max_excess() const;
};

// Lists every class/path carrying more than mass * 1e-9 whose perceived cost
// exceeds the class minimum by more than `epsilon`.
DeviationReport VerifyNash(const PerceivedCostContext& context,
                           const FlowAssignment& flow, double epsilon);

}  // namespace slowroute

#endif  // SLOWROUTE_EQUILIBRIUM_H_
