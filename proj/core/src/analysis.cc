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

#include "slowroute/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "slowroute/error.h"

namespace slowroute {

SolveDiagnostics SolveDiagnostics::From(const EquilibriumResult& result) {
  return {result.converged, result.relative_gap, result.iterations,
          result.total_latency, result.possibly_non_unique};
}

namespace {

EquilibriumResult SolveConverged(const RoutingProblem& problem,
                                 const SensitivityProfile& profile,
                                 double gamma, const SolverConfig& config) {
  const PerceivedCostContext context =
      PerceivedCostContext::Create(problem, profile, {gamma});
  EquilibriumResult result = SolveNash(context, config);
  if (!result.converged) {
    char text[96];
    std::snprintf(text, sizeof text,
                  "Nash solve at gamma = %g stopped at relative gap %.3e",
                  gamma, result.relative_gap);
    throw Error(ErrorCode::kNotConverged, text);
  }
  return result;
}

void CheckBetaBounds(double beta_low, double beta_high) {
  if (!(beta_low > 0.0 && beta_low <= beta_high && beta_high < 1.0)) {
    throw Error(ErrorCode::kInvalidBounds,
                "need 0 < beta_low <= beta_high < 1");
  }
}

}  // namespace

PerversityRecord PerversityRatio(const RoutingProblem& problem,
                                 const SensitivityProfile& profile,
                                 double gamma, const SolverConfig& config) {
  PerversityRecord record;
  record.instance_id = problem.name;
  record.gamma = gamma;
  const EquilibriumResult without =
      SolveConverged(problem, profile, 0.0, config);
  const EquilibriumResult with =
      gamma == 0.0 ? without : SolveConverged(problem, profile, gamma, config);
  if (!(without.total_latency > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance,
                "unsignaled equilibrium has zero latency");
  }
  record.latency_without_signal = without.total_latency;
  record.latency_with_signal = with.total_latency;
  record.ratio = with.total_latency / without.total_latency;
  record.without_signal = SolveDiagnostics::From(without);
  record.with_signal = SolveDiagnostics::From(with);
  return record;
}

OptimalSignalResult OptimalSignal(double beta_low, double beta_high) {
  CheckBetaBounds(beta_low, beta_high);
  const double gamma_star = 1.0 / (beta_low + beta_high);
  return {gamma_star, gamma_star > 1.0};
}

double WorstCasePoaBound(double beta_low, double beta_high) {
  CheckBetaBounds(beta_low, beta_high);
  // 4/3 * (1 - q / (1 + q)^2) rearranged so that q = 1 gives exactly 1.
  const double q = beta_low / beta_high;
  return 4.0 * (1.0 + q + q * q) / (3.0 * (1.0 + q) * (1.0 + q));
}

double NonPerverseSignalThreshold(int degree) {
  if (degree < 1) throw Error(ErrorCode::kInvalidArgument, "degree must be >= 1");
  return static_cast<double>(degree) / (degree + 1);
}

double PoaRatio(const RoutingProblem& problem,
                const SensitivityProfile& profile, double gamma,
                const SolverConfig& config) {
  const EquilibriumResult nash = SolveConverged(problem, profile, gamma, config);
  const EquilibriumResult optimum = SolveOptimum(problem, config);
  if (!optimum.converged) {
    throw Error(ErrorCode::kNotConverged, "optimum solve did not converge");
  }
  if (optimum.total_latency == 0.0) return 1.0;
  return nash.total_latency / optimum.total_latency;
}

std::string WorstCasePreconditionFailure(const RoutingProblem& problem,
                                         const SolverConfig& config) {
  const ValidationReport report = ValidateProblem(problem);
  if (!report.ok()) return report.ToString();
  if (Classify(problem) != NetworkClass::kParallel) {
    return "network is not parallel";
  }
  if (problem.UniformDegree() != 1) return "edges are not all affine";
  const PerceivedCostContext context = PerceivedCostContext::Create(
      problem, SensitivityProfile::Homogeneous(problem, 0.0), {0.0});
  const EquilibriumResult nash = SolveNash(context, config);
  if (!nash.converged) return "unsignaled equilibrium did not converge";
  const double floor = 1e-6 * problem.TotalRate();
  for (int e = 0; e < problem.num_edges(); ++e) {
    if (!(nash.flow.edge_flows()[e] > floor)) {
      return "edge " + std::to_string(e) +
             " is unused at the unsignaled equilibrium";
    }
  }
  return "";
}

WorstCaseProfile WorstCaseOverBeta(const RoutingProblem& problem,
                                   double beta_low, double beta_high,
                                   double gamma, const SolverConfig& config,
                                   double mass_step) {
  if (!(beta_low >= 0.0 && beta_low <= beta_high && beta_high <= 1.0)) {
    throw Error(ErrorCode::kInvalidBounds,
                "need 0 <= beta_low <= beta_high <= 1");
  }
  if (!(mass_step > 0.0 && mass_step <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mass_step must be in (0, 1]");
  }
  const std::string failure = WorstCasePreconditionFailure(problem, config);
  if (!failure.empty()) throw Error(ErrorCode::kPreconditionViolated, failure);

  WorstCaseProfile worst;
  worst.latency = -1.0;
  if (beta_low == beta_high) {
    worst.profile = SensitivityProfile::Homogeneous(problem, beta_low);
    worst.low_fraction = 1.0;
    worst.latency =
        SolveConverged(problem, worst.profile, gamma, config).total_latency;
    worst.trace.emplace_back(1.0, worst.latency);
    return worst;
  }

  const int steps = static_cast<int>(std::lround(1.0 / mass_step));
  for (int i = 0; i <= steps; ++i) {
    const double low = static_cast<double>(i) / steps;
    SensitivityProfile profile;
    for (const Commodity& c : problem.commodities) {
      std::vector<SensitivityClass> classes;
      if (i > 0) classes.push_back({beta_low, low * c.rate});
      if (i < steps) classes.push_back({beta_high, c.rate - low * c.rate});
      profile.classes.push_back(std::move(classes));
    }
    const double latency =
        SolveConverged(problem, profile, gamma, config).total_latency;
    worst.trace.emplace_back(low, latency);
    if (latency > worst.latency) {
      worst.latency = latency;
      worst.low_fraction = low;
      worst.profile = std::move(profile);
    }
  }
  return worst;
}

}  // namespace slowroute
