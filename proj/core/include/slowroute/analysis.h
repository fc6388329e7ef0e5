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

#ifndef SLOWROUTE_ANALYSIS_H_
#define SLOWROUTE_ANALYSIS_H_

#include <string>
#include <vector>

#include "slowroute/equilibrium.h"
#include "slowroute/network.h"
#include "slowroute/population.h"

namespace slowroute {

// Convergence evidence kept alongside every ratio.
struct SolveDiagnostics {
  bool converged = false;
  double relative_gap = 0.0;
  int iterations = 0;
  double total_latency = 0.0;
  bool possibly_non_unique = false;

  static SolveDiagnostics From(const EquilibriumResult& result);
};

// Equilibrium latency with the signal divided by equilibrium latency without
// it. A ratio above 1 means the signal hurts on this instance.
struct PerversityRecord {
  std::string instance_id;
  double gamma = 0.0;
  double latency_with_signal = 0.0;
  double latency_without_signal = 0.0;
  double ratio = 1.0;
  SolveDiagnostics with_signal;
  SolveDiagnostics without_signal;
};

// Throws kNotConverged if either solve fails to converge and
// kDegenerateInstance if the unsignaled latency is zero.
PerversityRecord PerversityRatio(const RoutingProblem& problem,
                                 const SensitivityProfile& profile,
                                 double gamma, const SolverConfig& config = {});

struct OptimalSignalResult {
  double gamma_star = 0.0;
  // True when the optimal signal exaggerates slowdowns (gamma_star > 1).
  bool over_statement = false;
};

// Signal minimizing worst-case equilibrium latency on affine parallel
// networks whose links are all used, for sensitivities in
// [beta_low, beta_high]: 1 / (beta_low + beta_high). Requires
// 0 < beta_low <= beta_high < 1 (kInvalidBounds).
OptimalSignalResult OptimalSignal(double beta_low, double beta_high);

// Worst-case equilibrium-to-optimal latency ratio under OptimalSignal:
//   4/3 * (1 - q / (1 + q)^2),  q = beta_low / beta_high.
double WorstCasePoaBound(double beta_low, double beta_high);

// Largest signal that can never hurt on parallel networks of degree d:
// d / (d + 1).
double NonPerverseSignalThreshold(int degree);

// L_nf(gamma) / L_opt. Throws kNotConverged.
double PoaRatio(const RoutingProblem& problem,
                const SensitivityProfile& profile, double gamma,
                const SolverConfig& config = {});

struct WorstCaseProfile {
  SensitivityProfile profile;
  // Fraction of each commodity's rate assigned to beta_low.
  double low_fraction = 0.0;
  double latency = 0.0;
  // (low_fraction, latency) for every grid point, in grid order.
  std::vector<std::pair<double, double>> trace;
};

// Maximizes equilibrium latency over two-point populations {beta_low,
// beta_high} with the low fraction on a grid of spacing `mass_step`
// (endpoints included). Requires a parallel network with degree-1 edges that
// all carry more than 1e-6 * rate at the unsignaled equilibrium
// (kPreconditionViolated otherwise).
WorstCaseProfile WorstCaseOverBeta(const RoutingProblem& problem,
                                   double beta_low, double beta_high,
                                   double gamma,
                                   const SolverConfig& config = {},
                                   double mass_step = 0.05);

// Checks the WorstCaseOverBeta preconditions without running the sweep.
// Returns an empty string when they hold, else the reason they fail.
std::string WorstCasePreconditionFailure(const RoutingProblem& problem,
                                         const SolverConfig& config = {});

}  // namespace slowroute

#endif  // SLOWROUTE_ANALYSIS_H_
