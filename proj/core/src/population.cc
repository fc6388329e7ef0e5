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

#include "slowroute/population.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "slowroute/error.h"

namespace slowroute {

SensitivityProfile SensitivityProfile::Homogeneous(
    const RoutingProblem& problem, double beta) {
  SensitivityProfile profile;
  for (const Commodity& c : problem.commodities) {
    profile.classes.push_back({{beta, c.rate}});
  }
  return profile;
}

void SensitivityProfile::Canonicalize() {
  for (auto& list : classes) {
    std::stable_sort(list.begin(), list.end(),
                     [](const SensitivityClass& x, const SensitivityClass& y) {
                       return x.beta < y.beta;
                     });
  }
}

ValidationReport ValidateProfile(const RoutingProblem& problem,
                                 const SensitivityProfile& profile) {
  ValidationReport report;
  if (profile.num_commodities() != problem.num_commodities()) {
    report.violations.push_back("profile has " +
                                std::to_string(profile.num_commodities()) +
                                " commodities, problem has " +
                                std::to_string(problem.num_commodities()));
    return report;
  }
  for (int c = 0; c < profile.num_commodities(); ++c) {
    const auto& list = profile.classes[c];
    const std::string where = "commodity " + std::to_string(c);
    if (list.empty()) {
      report.violations.push_back(where + ": no sensitivity classes");
      continue;
    }
    double total = 0.0;
    for (size_t k = 0; k < list.size(); ++k) {
      const SensitivityClass& cls = list[k];
      const std::string cw = where + " class " + std::to_string(k);
      if (!(std::isfinite(cls.beta) && cls.beta >= 0.0 && cls.beta <= 1.0)) {
        report.violations.push_back(cw + ": beta out of [0,1]");
      }
      if (!(std::isfinite(cls.mass) && cls.mass > 0.0)) {
        report.violations.push_back(cw + ": mass must be positive");
      }
      if (k > 0 && list[k - 1].beta > cls.beta) {
        report.violations.push_back(cw + ": classes not sorted by beta");
      }
      total += cls.mass;
    }
    const double rate = problem.commodities[c].rate;
    if (std::abs(total - rate) > kFeasibilityTolerance * rate) {
      std::ostringstream msg;
      msg.precision(17);
      msg << where << ": class masses sum to " << total << ", rate is "
          << rate;
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

double BetaToAlpha(double beta, double gamma, int degree) {
  if (!(beta >= 0.0 && beta <= 1.0) || !(gamma >= 0.0) || degree < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "BetaToAlpha needs beta in [0,1], gamma >= 0, degree >= 1");
  }
  const double scaled = gamma * beta;
  if (scaled >= 1.0) {
    throw Error(ErrorCode::kSingularTransform,
                "gamma * beta must be below 1 to map onto altruism");
  }
  return scaled / (degree * (1.0 - scaled));
}

double AlphaToBeta(double alpha, int degree) {
  if (!(alpha >= 0.0) || degree < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "AlphaToBeta needs alpha >= 0 and degree >= 1");
  }
  if (std::isinf(alpha)) return 1.0;
  const double ad = alpha * degree;
  return ad / (ad + 1.0);
}

std::pair<double, double> ProfileBounds(const SensitivityProfile& profile) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& list : profile.classes) {
    for (const SensitivityClass& cls : list) {
      lo = std::min(lo, cls.beta);
      hi = std::max(hi, cls.beta);
    }
  }
  if (lo > hi) throw Error(ErrorCode::kInvalidArgument, "empty profile");
  return {lo, hi};
}

std::vector<std::vector<double>> ClassMasses(
    const SensitivityProfile& profile) {
  std::vector<std::vector<double>> masses;
  masses.reserve(profile.classes.size());
  for (const auto& list : profile.classes) {
    std::vector<double> m;
    m.reserve(list.size());
    for (const SensitivityClass& cls : list) m.push_back(cls.mass);
    masses.push_back(std::move(m));
  }
  return masses;
}

void CheckFeasible(const RoutingProblem& problem,
                   const SensitivityProfile& profile,
                   const FlowAssignment& flow) {
  CheckFeasible(problem, flow);
  const double tol = kFeasibilityTolerance * problem.TotalRate();
  const ClassPathFlows& flows = flow.class_flows();
  for (int c = 0; c < problem.num_commodities(); ++c) {
    if (flows[c].size() != profile.classes[c].size()) {
      throw Error(ErrorCode::kInfeasibleFlow,
                  "class count mismatch in commodity " + std::to_string(c));
    }
    for (size_t k = 0; k < flows[c].size(); ++k) {
      double sum = 0.0;
      for (double f : flows[c][k]) sum += f;
      if (std::abs(sum - profile.classes[c][k].mass) > tol) {
        throw Error(ErrorCode::kInfeasibleFlow,
                    "class " + std::to_string(k) + " of commodity " +
                        std::to_string(c) + " does not route its mass");
      }
    }
  }
}

}  // namespace slowroute
