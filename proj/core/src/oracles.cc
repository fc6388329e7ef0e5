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

#include "slowroute/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "slowroute/error.h"

namespace slowroute {

RoutingProblem MakeTwoLinkProblem(double a1, double b1, double a2, double b2,
                                  double rate) {
  RoutingProblem problem;
  problem.name = "two-link";
  problem.nodes = {"s", "t"};
  problem.edges = {{0, 1, {a1, 1, b1}}, {0, 1, {a2, 1, b2}}};
  problem.commodities = {{0, 1, rate, {{0}, {1}}}};
  return problem;
}

FlowAssignment TwoLinkOracle(double a1, double b1, double a2, double b2,
                             const std::vector<SensitivityClass>& classes,
                             double gamma) {
  if (classes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "oracle needs at least one class");
  }
  double rate = 0.0;
  for (const SensitivityClass& c : classes) rate += c.mass;
  const RoutingProblem problem = MakeTwoLinkProblem(a1, b1, a2, b2, rate);
  const double slope = a1 + a2;

  // Class k strictly prefers link 1 iff slope * x1 < threshold[k].
  std::vector<double> threshold;
  for (const SensitivityClass& c : classes) {
    threshold.push_back(a2 * rate - (b1 - b2) * (1.0 - gamma * c.beta));
  }

  std::vector<double> on_first(classes.size(), 0.0);
  if (slope == 0.0) {
    for (size_t k = 0; k < classes.size(); ++k) {
      if (threshold[k] == 0.0) {
        throw Error(ErrorCode::kDegenerateInstance,
                    "constant links tie for class " + std::to_string(k));
      }
      on_first[k] = threshold[k] > 0.0 ? classes[k].mass : 0.0;
    }
  } else {
    // Groups of classes with identical thresholds, most eager first.
    std::vector<size_t> order(classes.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
      return threshold[i] > threshold[j];
    });
    double filled = 0.0;
    size_t g = 0;
    while (g < order.size()) {
      size_t end = g;
      double group_mass = 0.0;
      while (end < order.size() &&
             threshold[order[end]] == threshold[order[g]]) {
        group_mass += classes[order[end]].mass;
        ++end;
      }
      const double t = threshold[order[g]];
      if (t <= slope * filled) break;  // group weakly prefers link 2
      double fraction = 1.0;
      if (t < slope * (filled + group_mass)) {
        fraction = (t / slope - filled) / group_mass;
      }
      for (size_t i = g; i < end; ++i) {
        on_first[order[i]] = fraction * classes[order[i]].mass;
      }
      filled += fraction * group_mass;
      if (fraction < 1.0) break;
      g = end;
    }
  }

  ClassPathFlows flows(1);
  for (size_t k = 0; k < classes.size(); ++k) {
    flows[0].push_back({on_first[k], classes[k].mass - on_first[k]});
  }
  return FlowAssignment(problem, std::move(flows));
}

namespace {

// Visits every way of splitting `units` among `parts` bins.
void Compositions(int units, int parts, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    current.push_back(units);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int u = 0; u <= units; ++u) {
    current.push_back(u);
    Compositions(units - u, parts - 1, current, out);
    current.pop_back();
  }
}

double Binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

FlowAssignment BruteForceOracle(const PerceivedCostContext& context,
                                double resolution) {
  if (!(resolution > 0.0 && resolution <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "resolution must be in (0, 1]");
  }
  const RoutingProblem& problem = context.problem();
  const SensitivityProfile& profile = context.profile();
  const int units = static_cast<int>(std::lround(1.0 / resolution));

  struct BlockGrid {
    int commodity;
    int cls;
    double mass;
    std::vector<std::vector<int>> points;
  };
  std::vector<BlockGrid> blocks;
  int dimension = 0;
  double grid_size = 1.0;
  for (int c = 0; c < problem.num_commodities(); ++c) {
    const int n = static_cast<int>(problem.commodities[c].paths.size());
    for (int k = 0; k < static_cast<int>(profile.classes[c].size()); ++k) {
      dimension += n;
      grid_size *= Binomial(units + n - 1, n - 1);
      blocks.push_back({c, k, profile.classes[c][k].mass, {}});
    }
  }
  if (dimension > 6 || grid_size > 5e7) {
    throw Error(ErrorCode::kDimensionTooLarge,
                "grid of dimension " + std::to_string(dimension) +
                    " is too large for brute force");
  }
  for (BlockGrid& b : blocks) {
    std::vector<int> scratch;
    Compositions(units,
                 static_cast<int>(problem.commodities[b.commodity].paths.size()),
                 scratch, b.points);
  }

  ClassPathFlows flows(problem.num_commodities());
  for (int c = 0; c < problem.num_commodities(); ++c) {
    flows[c].resize(profile.classes[c].size());
  }
  std::vector<size_t> index(blocks.size(), 0);
  double best_value = std::numeric_limits<double>::infinity();
  FlowAssignment best;
  for (;;) {
    for (size_t i = 0; i < blocks.size(); ++i) {
      const BlockGrid& b = blocks[i];
      const std::vector<int>& point = b.points[index[i]];
      std::vector<double>& f = flows[b.commodity][b.cls];
      f.resize(point.size());
      for (size_t p = 0; p < point.size(); ++p) {
        f[p] = b.mass * point[p] / units;
      }
    }
    FlowAssignment candidate(problem, flows);
    const double value = Potential(context, candidate);
    if (value < best_value) {
      best_value = value;
      best = std::move(candidate);
    }
    size_t i = 0;
    while (i < blocks.size() && ++index[i] == blocks[i].points.size()) {
      index[i] = 0;
      ++i;
    }
    if (i == blocks.size()) break;
  }
  return best;
}

}  // namespace slowroute
