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

#ifndef SLOWROUTE_POPULATION_H_
#define SLOWROUTE_POPULATION_H_

#include <utility>
#include <vector>

#include "slowroute/network.h"

namespace slowroute {

// A block of users sharing one slowdown sensitivity.
struct SensitivityClass {
  double beta = 0.0;
  double mass = 0.0;

  friend bool operator==(const SensitivityClass&,
                         const SensitivityClass&) = default;
};

// Piecewise-constant sensitivity distribution: for each commodity an ordered
// list of classes, nondecreasing in beta, whose masses sum to the rate.
struct SensitivityProfile {
  std::vector<std::vector<SensitivityClass>> classes;

  int num_commodities() const { return static_cast<int>(classes.size()); }

  // Every commodity gets one class with the given beta and its full rate.
  static SensitivityProfile Homogeneous(const RoutingProblem& problem,
                                        double beta);

  // Sorts each commodity's classes by beta (stable).
  void Canonicalize();

  friend bool operator==(const SensitivityProfile&,
                         const SensitivityProfile&) = default;
};

ValidationReport ValidateProfile(const RoutingProblem& problem,
                                 const SensitivityProfile& profile);

// Planner's broadcast slowdown scale. gamma in [0, 1] reports true slowdowns
// at a fraction of their size; gamma > 1 over-states them.
struct SignalPolicy {
  double gamma = 0.0;

  bool over_statement() const { return gamma > 1.0; }
};

// alpha = gamma*beta / (d * (1 - gamma*beta)). Throws kSingularTransform when
// gamma*beta >= 1 and kInvalidArgument for out-of-domain inputs.
double BetaToAlpha(double beta, double gamma, int degree);

// beta = alpha*d / (alpha*d + 1), the inverse of BetaToAlpha at gamma = 1.
double AlphaToBeta(double alpha, int degree);

// (min, max) beta over all classes of all commodities.
std::pair<double, double> ProfileBounds(const SensitivityProfile& profile);

// [commodity][class] masses, the shape FlowAssignment feasibility is checked
// against.
std::vector<std::vector<double>> ClassMasses(const SensitivityProfile& profile);

// Like CheckFeasible, but additionally requires every class block to carry
// exactly its mass.
void CheckFeasible(const RoutingProblem& problem,
                   const SensitivityProfile& profile,
                   const FlowAssignment& flow);

}  // namespace slowroute

#endif  // SLOWROUTE_POPULATION_H_
