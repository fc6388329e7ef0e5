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

#include "slowroute/network.h"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "generators.h"
#include "slowroute/error.h"
#include "slowroute/instance_io.h"

namespace slowroute {
namespace {

RoutingProblem Pigou() { return BuiltinInstance("pigou").problem; }
RoutingProblem Braess() { return BuiltinInstance("braess").problem; }

bool Mentions(const ValidationReport& report, const std::string& text) {
  for (const std::string& v : report.violations) {
    if (v.find(text) != std::string::npos) return true;
  }
  return false;
}

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(LatencyFunction, FreeFlowIsExactlyB) {
  const LatencyFunction l{2.5, 3, 0.7};
  EXPECT_EQ(l(0.0), 0.7);
  EXPECT_EQ(l.FreeFlow(), 0.7);
  EXPECT_DOUBLE_EQ(l(2.0), 2.5 * 8.0 + 0.7);
  EXPECT_DOUBLE_EQ(l.Derivative(2.0), 2.5 * 3 * 4.0);
  EXPECT_DOUBLE_EQ(l.Integral(2.0), 2.5 * 16.0 / 4.0 + 0.7 * 2.0);
}

TEST(ValidateProblem, PigouIsWellFormed) {
  EXPECT_TRUE(ValidateProblem(Pigou()).ok());
}

TEST(ValidateProblem, NegativeCoefficient) {
  RoutingProblem p = Pigou();
  p.edges[0].latency.a = -1.0;
  const ValidationReport report = ValidateProblem(p);
  EXPECT_FALSE(report.ok());
  EXPECT_TRUE(Mentions(report, "negative coefficient")) << report.ToString();
}

TEST(ValidateProblem, EmptyPathList) {
  RoutingProblem p = Pigou();
  p.commodities[0].paths.clear();
  EXPECT_TRUE(Mentions(ValidateProblem(p), "no paths"));
}

TEST(ValidateProblem, ReportsEveryViolation) {
  RoutingProblem p = Braess();
  p.edges[1].latency.b = -0.5;
  p.commodities[0].rate = 0.0;
  p.commodities[0].paths.push_back({1, 3});  // s-w then v-t: disconnected
  p.commodities[0].paths.push_back(p.commodities[0].paths[0]);
  const ValidationReport report = ValidateProblem(p);
  EXPECT_TRUE(Mentions(report, "negative coefficient b"));
  EXPECT_TRUE(Mentions(report, "rate"));
  EXPECT_TRUE(Mentions(report, "disconnected"));
  EXPECT_TRUE(Mentions(report, "duplicate path"));
}

TEST(EnumeratePaths, TwoParallelEdges) {
  const RoutingProblem p = Pigou();
  const std::vector<Path> paths = EnumeratePaths(p.nodes, p.edges, 0, 1);
  EXPECT_EQ(paths, (std::vector<Path>{{0}, {1}}));
}

TEST(EnumeratePaths, BraessHasThreePathsInLexicographicOrder) {
  const RoutingProblem p = Braess();
  const std::vector<Path> paths = EnumeratePaths(p.nodes, p.edges, 0, 3);
  // s-v-w-t, s-v-t, s-w-t
  EXPECT_EQ(paths, (std::vector<Path>{{0, 2, 4}, {0, 3}, {1, 4}}));
}

TEST(EnumeratePaths, CapExceeded) {
  const RoutingProblem p = Braess();
  EXPECT_EQ(CodeOf([&] { EnumeratePaths(p.nodes, p.edges, 0, 3, 2); }),
            ErrorCode::kPathExplosion);
  EXPECT_EQ(EnumeratePaths(p.nodes, p.edges, 0, 3, 3).size(), 3u);
}

TEST(EnumeratePaths, NoPath) {
  const RoutingProblem p = Braess();
  EXPECT_EQ(CodeOf([&] { EnumeratePaths(p.nodes, p.edges, 3, 0); }),
            ErrorCode::kNoPath);
}

TEST(EnumeratePaths, Deterministic) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    // Random DAG-ish graph with parallel edges and back edges.
    std::vector<std::string> nodes = {"a", "b", "c", "d", "e"};
    std::vector<Edge> edges;
    for (int i = 0; i < 12; ++i) {
      edges.push_back({testing::UniformInt(rng, 0, 4),
                       testing::UniformInt(rng, 0, 4), {1.0, 1, 0.0}});
    }
    std::vector<Path> first, second;
    try {
      first = EnumeratePaths(nodes, edges, 0, 4, 1000);
    } catch (const Error&) {
      continue;
    }
    second = EnumeratePaths(nodes, edges, 0, 4, 1000);
    EXPECT_EQ(first, second);
    EXPECT_TRUE(std::is_sorted(first.begin(), first.end()));
    for (const Path& path : first) {
      std::set<int> visited = {0};
      int at = 0;
      for (int e : path) {
        ASSERT_EQ(edges[e].tail, at);
        at = edges[e].head;
        EXPECT_TRUE(visited.insert(at).second) << "path is not simple";
      }
      EXPECT_EQ(at, 4);
    }
  }
}

TEST(Classify, Pigou) {
  EXPECT_EQ(Classify(Pigou()), NetworkClass::kParallel);
  const ClassificationReport flags = ClassifyFlags(Pigou());
  EXPECT_TRUE(flags.parallel);
  EXPECT_TRUE(flags.symmetric);
}

TEST(Classify, BraessIsSymmetricOnly) {
  const ClassificationReport flags = ClassifyFlags(Braess());
  EXPECT_FALSE(flags.parallel);
  EXPECT_TRUE(flags.symmetric);
  EXPECT_EQ(Classify(Braess()), NetworkClass::kSymmetric);
}

TEST(Classify, DistinctSinksAreGeneral) {
  RoutingProblem p = Braess();
  p.commodities.push_back({0, 2, 1.0, {}});
  EnumerateAllPaths(p);
  EXPECT_EQ(Classify(p), NetworkClass::kGeneral);
}

TEST(Classify, ParallelMeansPairwiseEdgeDisjoint) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    RoutingProblem p = trial % 2 ? testing::RandomParallel(rng).problem
                                 : testing::RandomBraess(rng).problem;
    if (Classify(p) != NetworkClass::kParallel) continue;
    std::vector<Path> all;
    for (const Commodity& c : p.commodities) {
      all.insert(all.end(), c.paths.begin(), c.paths.end());
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (all[i] == all[j]) continue;
        for (int e : all[i]) {
          EXPECT_EQ(std::count(all[j].begin(), all[j].end(), e), 0);
        }
      }
    }
  }
}

TEST(TotalLatency, Pigou) {
  const RoutingProblem p = Pigou();
  EXPECT_DOUBLE_EQ(
      TotalLatency(p, FlowAssignment::FromPathFlows(p, {{1.0, 0.0}})), 1.0);
  EXPECT_DOUBLE_EQ(
      TotalLatency(p, FlowAssignment::FromPathFlows(p, {{0.5, 0.5}})), 0.75);
}

TEST(TotalLatency, BraessZigZag) {
  const RoutingProblem p = Braess();
  const FlowAssignment flow = FlowAssignment::FromPathFlows(p, {{1.0, 0.0, 0.0}});
  EXPECT_EQ(flow.edge_flows(), (std::vector<double>{1, 0, 1, 0, 1}));
  EXPECT_DOUBLE_EQ(TotalLatency(p, flow), 2.0);
}

TEST(TotalLatency, RejectsInfeasibleFlow) {
  const RoutingProblem p = Pigou();
  EXPECT_EQ(CodeOf([&] {
              TotalLatency(p, FlowAssignment::FromPathFlows(p, {{0.6, 0.5}}));
            }),
            ErrorCode::kInfeasibleFlow);
  EXPECT_EQ(CodeOf([&] {
              TotalLatency(p, FlowAssignment::FromPathFlows(p, {{1.1, -0.1}}));
            }),
            ErrorCode::kInfeasibleFlow);
  // Drift within 1e-9 * r is tolerated.
  EXPECT_NO_THROW(
      TotalLatency(p, FlowAssignment::FromPathFlows(p, {{0.5, 0.5 + 5e-10}})));
}

TEST(TotalLatency, EdgeAndPathFormsAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const testing::RandomInstance inst =
        trial % 2 ? testing::RandomParallel(rng, {.degree = 1 + trial % 3})
                  : testing::RandomBraess(rng, 1 + trial % 3);
    const FlowAssignment flow(inst.problem,
                              testing::RandomFlow(rng, inst.problem, inst.profile));
    const double edge_form = TotalLatency(inst.problem, flow);
    const double path_form = TotalLatencyByPaths(inst.problem, flow);
    EXPECT_GE(edge_form, 0.0);
    EXPECT_NEAR(edge_form, path_form, 1e-12 * std::max(1.0, edge_form));
  }
}

TEST(TotalLatency, ZeroOnlyWhenUsedEdgesAreFree) {
  RoutingProblem p = Pigou();
  p.edges[1].latency.b = 0.0;
  EXPECT_EQ(TotalLatency(p, FlowAssignment::FromPathFlows(p, {{0.0, 1.0}})),
            0.0);
  EXPECT_GT(TotalLatency(p, FlowAssignment::FromPathFlows(p, {{1e-3, 1 - 1e-3}})),
            0.0);
}

TEST(FlowAssignment, EdgeFlowsAreSumsOfPathFlows) {
  const RoutingProblem p = Braess();
  const FlowAssignment flow(p, {{{0.1, 0.2, 0.3}, {0.05, 0.15, 0.2}}});
  EXPECT_DOUBLE_EQ(flow.path_flows()[0][0], 0.15);
  EXPECT_DOUBLE_EQ(flow.path_flows()[0][1], 0.35);
  EXPECT_DOUBLE_EQ(flow.path_flows()[0][2], 0.5);
  EXPECT_DOUBLE_EQ(flow.edge_flows()[0], 0.5);
  EXPECT_DOUBLE_EQ(flow.edge_flows()[1], 0.5);
  EXPECT_DOUBLE_EQ(flow.edge_flows()[2], 0.15);
  EXPECT_DOUBLE_EQ(flow.edge_flows()[3], 0.35);
  EXPECT_DOUBLE_EQ(flow.edge_flows()[4], 0.65);
}

TEST(PathLatency, Examples) {
  const RoutingProblem p = Pigou();
  for (double f : {0.0, 0.3, 1.0}) {
    const std::vector<double> x = {1.0 - f, f};
    EXPECT_EQ(PathLatency(p, {1}, x), 1.0);
  }
  EXPECT_DOUBLE_EQ(PathLatency(p, {0}, std::vector<double>{0.25, 0.75}), 0.25);
  const RoutingProblem b = Braess();
  EXPECT_DOUBLE_EQ(PathLatency(b, {0, 2, 4}, std::vector<double>{1, 0, 1, 0, 1}),
                   2.0);
}

}  // namespace
}  // namespace slowroute
