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

#ifndef SLOWROUTE_ORACLES_H_
#define SLOWROUTE_ORACLES_H_

#include <vector>

#include "slowroute/equilibrium.h"
#include "slowroute/network.h"
#include "slowroute/population.h"

namespace slowroute {

// Nodes {s, t}, edge 0 with latency a1*x + b1, edge 1 with a2*x + b2, one
// commodity of the given rate using paths {[0], [1]}.
RoutingProblem MakeTwoLinkProblem(double a1, double b1, double a2, double b2,
                                  double rate);

// Exact Nash flow on two parallel affine links for a finite population under
// slowdown costs. Each class compares
//   (a1 + a2) x1 - a2 r + (b1 - b2)(1 - gamma*beta)
// against zero, so classes ordered by their indifference point fill link 1
// greedily and at most one group of equally-sensitive classes splits.
// Classes keep their input order in the returned flow.
//
// Throws kDegenerateInstance if a1 = a2 = 0 and some class is exactly
// indifferent between the links.
FlowAssignment TwoLinkOracle(double a1, double b1, double a2, double b2,
                             const std::vector<SensitivityClass>& classes,
                             double gamma);

// Minimizes Potential over a grid on each class simplex with spacing
// `resolution` (fraction of the class mass). Intended for tiny instances only:
// throws kDimensionTooLarge when the number of class/path coordinates exceeds
// 6 or the grid would have more than 5e7 points.
FlowAssignment BruteForceOracle(const PerceivedCostContext& context,
                                double resolution);

}  // namespace slowroute

#endif  // SLOWROUTE_ORACLES_H_
