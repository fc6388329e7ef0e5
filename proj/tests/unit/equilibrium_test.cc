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

#include "slowroute/equilibrium.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "generators.h"
#include "slowroute/error.h"
#include "slowroute/instance_io.h"
#include "slowroute/oracles.h"

namespace slowroute {
namespace {

PerceivedCostContext Context(const Instance& instance, double gamma,
                             CostMode mode = CostMode::kSlowdown) {
  return PerceivedCostContext::Create(instance.problem, instance.profile,
                                      {gamma}, mode);
}

PerceivedCostContext Context(const testing::RandomInstance& instance,
                             double gamma,
                             CostMode mode = CostMode::kSlowdown) {
  return PerceivedCostContext::Create(instance.problem, instance.profile,
                                      {gamma}, mode);
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

TEST(PerceivedCost, SlowdownExamples) {
  const PerceivedCostContext ctx = Context(BuiltinInstance("pigou"), 0.5);
  for (double f1 : {0.0, 0.4, 1.0}) {
    const std::vector<double> x = {f1, 1.0 - f1};
    EXPECT_DOUBLE_EQ(PerceivedCost(ctx, 0, 0, 1, x), 0.5);
  }
  for (double gamma : {0.0, 0.5, 3.0}) {
    const PerceivedCostContext c = Context(BuiltinInstance("pigou"), gamma);
    EXPECT_DOUBLE_EQ(PerceivedCost(c, 0, 0, 0, std::vector<double>{0.3, 0.7}),
                     0.3);
  }
}

TEST(PerceivedCost, NegativeCostsAllowed) {
  const PerceivedCostContext ctx = Context(BuiltinInstance("pigou"), 2.0);
  EXPECT_DOUBLE_EQ(PerceivedCost(ctx, 0, 0, 1, std::vector<double>{0.0, 1.0}),
                   -1.0);
}

TEST(PerceivedCost, EmulatedExample) {
  Instance single;
  single.problem.nodes = {"s", "t"};
  single.problem.edges = {{0, 1, {1.0, 1, 2.0}}};
  single.problem.commodities = {{0, 1, 1.0, {{0}}}};
  // gamma * beta = 1/2 gives alpha = 1 at d = 1.
  single.profile.classes = {{{0.5, 1.0}}};
  const PerceivedCostContext ctx =
      Context(single, 1.0, CostMode::kEmulatedAltruism);
  EXPECT_DOUBLE_EQ(ctx.alpha(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(PerceivedCost(ctx, 0, 0, 0, std::vector<double>{0.5}), 3.0);
}

TEST(PerceivedCostContext, EmulatedModePreconditions) {
  Instance pigou = BuiltinInstance("pigou");
  EXPECT_EQ(CodeOf([&] { Context(pigou, 1.0, CostMode::kEmulatedAltruism); }),
            ErrorCode::kSingularTransform);
  pigou.problem.edges[1].latency.degree = 2;
  EXPECT_EQ(CodeOf([&] { Context(pigou, 0.5, CostMode::kEmulatedAltruism); }),
            ErrorCode::kPreconditionViolated);
  EXPECT_NO_THROW(Context(pigou, 0.5, CostMode::kSlowdown));
  pigou.profile.classes[0][0].beta = 1.5;
  EXPECT_EQ(CodeOf([&] { Context(pigou, 0.5); }), ErrorCode::kValidationError);
}

TEST(Potential, Examples) {
  const Instance pigou = BuiltinInstance("pigou");
  const PerceivedCostContext zero = Context(pigou, 0.0);
  EXPECT_DOUBLE_EQ(
      Potential(zero, FlowAssignment::FromPathFlows(pigou.problem, {{1, 0}})),
      0.5);
  EXPECT_DOUBLE_EQ(Potential(zero, FlowAssignment::FromPathFlows(
                                       pigou.problem, {{0.5, 0.5}})),
                   0.625);
  const PerceivedCostContext half = Context(pigou, 0.5);
  EXPECT_DOUBLE_EQ(Potential(half, FlowAssignment::FromPathFlows(
                                       pigou.problem, {{0.5, 0.5}})),
                   0.375);
}

TEST(Potential, RejectsInfeasibleFlow) {
  const Instance pigou = BuiltinInstance("pigou");
  EXPECT_EQ(CodeOf([&] {
              Potential(Context(pigou, 0.0),
                        FlowAssignment::FromPathFlows(pigou.problem, {{1, 1}}));
            }),
            ErrorCode::kInfeasibleFlow);
}

// Central difference of the potential along one class/path coordinate. The
// potential is defined on the whole nonnegative orthant, so the perturbed
// flow is evaluated by an unchecked copy of the formula.
double CoordinateDerivative(const PerceivedCostContext& ctx,
                            const ClassPathFlows& flows, int c, int k, int p,
                            double h) {
  auto value = [&](double delta) {
    const RoutingProblem& problem = ctx.problem();
    ClassPathFlows f = flows;
    f[c][k][p] += delta;
    const FlowAssignment flow(problem, f);
    double v = 0.0;
    for (int e = 0; e < problem.num_edges(); ++e) {
      const LatencyFunction& l = problem.edges[e].latency;
      v += l.Integral(flow.edge_flows()[e]);
      if (ctx.mode() == CostMode::kEmulatedAltruism) {
        v -= l.b * flow.edge_flows()[e];
      }
    }
    for (int cc = 0; cc < problem.num_commodities(); ++cc) {
      for (int kk = 0; kk < flow.num_classes(cc); ++kk) {
        const double w =
            ctx.mode() == CostMode::kSlowdown
                ? -ctx.gamma() * ctx.beta(cc, kk)
                : 1.0 / (1.0 + ctx.degree() * ctx.alpha(cc, kk));
        for (std::size_t pp = 0; pp < problem.commodities[cc].paths.size();
             ++pp) {
          double b = 0.0;
          for (int e : problem.commodities[cc].paths[pp]) {
            b += problem.edges[e].latency.b;
          }
          v += w * f[cc][kk][pp] * b;
        }
      }
    }
    return v;
  };
  return (value(h) - value(-h)) / (2.0 * h);
}

TEST(Potential, FormulaMatchesLibrary) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const testing::RandomInstance inst = testing::RandomBraess(rng, 1 + trial % 2);
    const PerceivedCostContext ctx = Context(inst, testing::Uniform(rng, 0, 1.5));
    const ClassPathFlows f = testing::RandomFlow(rng, inst.problem, inst.profile);
    const FlowAssignment flow(inst.problem, f);
    double expected = 0.0;
    for (int e = 0; e < inst.problem.num_edges(); ++e) {
      expected += inst.problem.edges[e].latency.Integral(flow.edge_flows()[e]);
    }
    for (int c = 0; c < inst.problem.num_commodities(); ++c) {
      for (int k = 0; k < flow.num_classes(c); ++k) {
        for (std::size_t p = 0; p < f[c][k].size(); ++p) {
          double b = 0.0;
          for (int e : inst.problem.commodities[c].paths[p]) {
            b += inst.problem.edges[e].latency.b;
          }
          expected -= ctx.gamma() * ctx.beta(c, k) * f[c][k][p] * b;
        }
      }
    }
    EXPECT_NEAR(Potential(ctx, flow), expected, 1e-12 * (1 + std::abs(expected)));
  }
}

TEST(Potential, GradientIsPerceivedCost) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const bool emulated = trial % 3 == 0;
    const int d = 1 + trial % 3;
    const testing::RandomInstance inst =
        trial % 2 ? testing::RandomBraess(rng, d, 0.05, 3, emulated ? 0.6 : 1.0)
                  : testing::RandomParallel(
                        rng, {.a_lo = 0.05, .degree = d,
                              .beta_hi = emulated ? 0.6 : 1.0});
    const double gamma = testing::Uniform(rng, 0.0, emulated ? 1.5 : 3.0);
    const PerceivedCostContext ctx = Context(
        inst, gamma,
        emulated ? CostMode::kEmulatedAltruism : CostMode::kSlowdown);
    const ClassPathFlows f = testing::RandomFlow(rng, inst.problem, inst.profile);
    const FlowAssignment flow(inst.problem, f);
    const int c = testing::UniformInt(rng, 0, inst.problem.num_commodities() - 1);
    const int k = testing::UniformInt(rng, 0, flow.num_classes(c) - 1);
    const int p = testing::UniformInt(
        rng, 0, static_cast<int>(inst.problem.commodities[c].paths.size()) - 1);
    const double h = 1e-6 * inst.problem.TotalRate();
    double cost = PerceivedCost(ctx, c, k, p, flow.edge_flows());
    if (emulated) cost /= 1.0 + d * ctx.alpha(c, k);
    const double fd = CoordinateDerivative(ctx, f, c, k, p, h);
    EXPECT_NEAR(fd, cost, 1e-6 * std::max(1.0, std::abs(cost)))
        << "trial " << trial;
  }
}

TEST(Potential, Convex) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const testing::RandomInstance inst =
        testing::RandomBraess(rng, 1 + trial % 3);
    const PerceivedCostContext ctx = Context(inst, testing::Uniform(rng, 0, 2));
    const ClassPathFlows f = testing::RandomFlow(rng, inst.problem, inst.profile);
    const ClassPathFlows g = testing::RandomFlow(rng, inst.problem, inst.profile);
    const double lambda = testing::Uniform(rng, 0.0, 1.0);
    ClassPathFlows mix = f;
    for (std::size_t c = 0; c < mix.size(); ++c) {
      for (std::size_t k = 0; k < mix[c].size(); ++k) {
        for (std::size_t p = 0; p < mix[c][k].size(); ++p) {
          mix[c][k][p] = lambda * f[c][k][p] + (1 - lambda) * g[c][k][p];
        }
      }
    }
    const double lhs = Potential(ctx, FlowAssignment(inst.problem, mix));
    const double rhs =
        lambda * Potential(ctx, FlowAssignment(inst.problem, f)) +
        (1 - lambda) * Potential(ctx, FlowAssignment(inst.problem, g));
    EXPECT_LE(lhs, rhs + 1e-10);
  }
}

TEST(SolveNash, PigouExamples) {
  const Instance pigou = BuiltinInstance("pigou");
  const EquilibriumResult zero = SolveNash(Context(pigou, 0.0));
  ASSERT_TRUE(zero.converged);
  EXPECT_NEAR(zero.flow.edge_flows()[0], 1.0, 1e-9);
  EXPECT_NEAR(zero.total_latency, 1.0, 1e-9);
  const EquilibriumResult half = SolveNash(Context(pigou, 0.5));
  ASSERT_TRUE(half.converged);
  EXPECT_NEAR(half.flow.edge_flows()[0], 0.5, 1e-9);
  EXPECT_NEAR(half.total_latency, 0.75, 1e-9);
  // Signal larger than the congestion-free cost drives everyone off link 1.
  const EquilibriumResult big = SolveNash(Context(pigou, 2.0));
  ASSERT_TRUE(big.converged);
  EXPECT_NEAR(big.flow.edge_flows()[1], 1.0, 1e-9);
  EXPECT_NEAR(big.per_class_min_cost[0][0], -1.0, 1e-9);
}

TEST(SolveNash, BraessAllOnZigZag) {
  for (const char* name : {"braess", "braess:beta=0"}) {
    const Instance braess = BuiltinInstance(name);
    for (double gamma : {0.0, 0.7}) {
      if (std::string(name) == "braess" && gamma != 0.0) continue;
      const EquilibriumResult r = SolveNash(Context(braess, gamma));
      ASSERT_TRUE(r.converged);
      EXPECT_NEAR(r.flow.path_flows()[0][0], 1.0, 1e-6);
      EXPECT_NEAR(r.total_latency, 2.0, 1e-9);
    }
  }
}

TEST(SolveNash, ConvergedSolvesPassWardropCheck) {
  std::mt19937_64 rng(12);
  const SolverConfig config;
  for (int trial = 0; trial < 60; ++trial) {
    const testing::RandomInstance inst =
        trial % 2 ? testing::RandomBraess(rng, 1 + trial % 3)
                  : testing::RandomParallel(rng, {.degree = 1 + trial % 3});
    const PerceivedCostContext ctx = Context(inst, testing::Uniform(rng, 0, 2));
    const EquilibriumResult r = SolveNash(ctx, config);
    ASSERT_TRUE(r.converged) << "trial " << trial;
    EXPECT_LE(r.relative_gap, config.tolerance);
    EXPECT_GE(r.relative_gap, 0.0);
    EXPECT_NEAR(r.total_latency, TotalLatency(inst.problem, r.flow),
                1e-12 * std::max(1.0, r.total_latency));
    EXPECT_NO_THROW(CheckFeasible(inst.problem, ctx.profile(), r.flow));
    const DeviationReport report = VerifyNash(ctx, r.flow, r.wardrop_epsilon);
    EXPECT_TRUE(report.ok()) << "max excess " << report.max_excess();
    EXPECT_NEAR(r.potential_value, Potential(ctx, r.flow),
                1e-9 * (1 + std::abs(r.potential_value)));
  }
}

TEST(SolveNash, NearlyEqualClassesSortThemselvesOut) {
  Instance inst;
  inst.problem = MakeTwoLinkProblem(0.7854621452140913, 0.7175932523995807,
                                    1.0864216242374241, 0.7189079455785462,
                                    0.17680289150012696);
  inst.profile.classes = {{{0.1700154515936555, 0.036497775859004662},
                           {0.17112189734201641, 0.1403051156411223}}};
  const PerceivedCostContext ctx = Context(inst, 0.1);
  const EquilibriumResult r = SolveNash(ctx);
  ASSERT_TRUE(r.converged);
  EXPECT_TRUE(VerifyNash(ctx, r.flow, r.wardrop_epsilon).ok());
  // The less sensitive class keeps off the link with the larger free flow.
  EXPECT_EQ(r.flow.class_flow(0, 0, 1), 0.0);
}

TEST(SolveNash, DeterministicForSameConfig) {
  std::mt19937_64 rng(13);
  const testing::RandomInstance inst = testing::RandomBraess(rng, 2);
  const PerceivedCostContext ctx = Context(inst, 0.6);
  SolverConfig config;
  config.initialization = Initialization::kRandom;
  config.seed = 99;
  const EquilibriumResult a = SolveNash(ctx, config);
  const EquilibriumResult b = SolveNash(ctx, config);
  EXPECT_EQ(a.flow.class_flows(), b.flow.class_flows());
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveNash, MinimumCostsIndependentOfStart) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const testing::RandomInstance inst =
        testing::RandomBraess(rng, 1 + trial % 2, 0.1);
    const PerceivedCostContext ctx = Context(inst, testing::Uniform(rng, 0, 1));
    SolverConfig first;
    SolverConfig second;
    second.initialization = Initialization::kRandom;
    second.seed = trial + 1;
    const EquilibriumResult a = SolveNash(ctx, first);
    const EquilibriumResult b = SolveNash(ctx, second);
    ASSERT_TRUE(a.converged && b.converged);
    for (std::size_t c = 0; c < a.per_class_min_cost.size(); ++c) {
      for (std::size_t k = 0; k < a.per_class_min_cost[c].size(); ++k) {
        EXPECT_NEAR(a.per_class_min_cost[c][k], b.per_class_min_cost[c][k],
                    1e-6);
      }
    }
  }
}

TEST(SolveNash, WarmStart) {
  const Instance pigou = BuiltinInstance("pigou");
  const PerceivedCostContext ctx = Context(pigou, 0.25);
  const FlowAssignment start =
      FlowAssignment::FromPathFlows(pigou.problem, {{0.2, 0.8}});
  const EquilibriumResult r = SolveNash(ctx, {}, start);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.flow.edge_flows()[0], 0.75, 1e-9);
}

TEST(SolveNash, EmulatedMatchesSlowdown) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3;
    const testing::RandomInstance inst =
        trial % 2 ? testing::RandomBraess(rng, d, 0.1, 3, 0.9)
                  : testing::RandomParallel(
                        rng, {.a_lo = 0.1, .degree = d, .beta_hi = 0.9});
    const PerceivedCostContext slow = Context(inst, 1.0);
    const PerceivedCostContext emulated =
        Context(inst, 1.0, CostMode::kEmulatedAltruism);
    const EquilibriumResult a = SolveNash(slow);
    const EquilibriumResult b = SolveNash(emulated);
    ASSERT_TRUE(a.converged && b.converged);
    for (int e = 0; e < inst.problem.num_edges(); ++e) {
      EXPECT_NEAR(a.flow.edge_flows()[e], b.flow.edge_flows()[e], 1e-5);
    }
    EXPECT_TRUE(VerifyNash(emulated, b.flow, b.wardrop_epsilon).ok());
  }
}

TEST(SolveNash, IterationLimitReturnsBestIterate) {
  const Instance inst = BuiltinInstance("pigou-d:d=3");
  SolverConfig config;
  config.max_iterations = 1;
  config.pairwise_moves = false;
  config.step_rule = StepRule::kHarmonic;
  const EquilibriumResult r = SolveNash(Context(inst, 0.3), config);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.relative_gap, config.tolerance);
  EXPECT_NO_THROW(CheckFeasible(inst.problem, r.flow));
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(SolveNash, HarmonicStepsConvergeAtLooseTolerance) {
  SolverConfig config;
  config.step_rule = StepRule::kHarmonic;
  config.pairwise_moves = false;
  config.tolerance = 1e-4;
  const EquilibriumResult r =
      SolveNash(Context(BuiltinInstance("pigou"), 0.25), config);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.flow.edge_flows()[0], 0.75, 1e-2);
}

TEST(SolveNash, RejectsBadConfig) {
  SolverConfig config;
  config.tolerance = 0.0;
  EXPECT_EQ(CodeOf([&] { SolveNash(Context(BuiltinInstance("pigou"), 0), config); }),
            ErrorCode::kInvalidArgument);
}

TEST(SolveNash, FlagsPossibleNonUniqueness) {
  EXPECT_TRUE(SolveNash(Context(BuiltinInstance("pigou"), 0)).possibly_non_unique);
  EXPECT_FALSE(SolveNash(Context(BuiltinInstance("two-class-two-link"), 0))
                   .possibly_non_unique);
}

TEST(SolveOptimum, Examples) {
  const EquilibriumResult pigou = SolveOptimum(BuiltinInstance("pigou").problem);
  ASSERT_TRUE(pigou.converged);
  EXPECT_NEAR(pigou.flow.edge_flows()[0], 0.5, 1e-9);
  EXPECT_NEAR(pigou.total_latency, 0.75, 1e-12);

  RoutingProblem twin = BuiltinInstance("pigou").problem;
  twin.edges[1].latency = {1.0, 1, 0.0};
  const EquilibriumResult sym = SolveOptimum(twin);
  EXPECT_NEAR(sym.flow.edge_flows()[0], 0.5, 1e-9);
  EXPECT_NEAR(sym.total_latency, 0.5, 1e-12);

  const EquilibriumResult braess = SolveOptimum(BuiltinInstance("braess").problem);
  ASSERT_TRUE(braess.converged);
  EXPECT_NEAR(braess.total_latency, 1.5, 1e-9);
  EXPECT_NEAR(braess.flow.path_flows()[0][1], 0.5, 1e-6);
  EXPECT_NEAR(braess.flow.path_flows()[0][2], 0.5, 1e-6);
}

TEST(SolveOptimum, NeverWorseThanNash) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 40; ++trial) {
    const testing::RandomInstance inst = testing::RandomBraess(rng, 1 + trial % 3);
    const EquilibriumResult opt = SolveOptimum(inst.problem);
    const EquilibriumResult nash = SolveNash(Context(inst, testing::Uniform(rng, 0, 2)));
    ASSERT_TRUE(opt.converged && nash.converged);
    EXPECT_GE(nash.total_latency / opt.total_latency, 1.0 - 1e-8);
  }
}

TEST(VerifyNash, Examples) {
  const Instance pigou = BuiltinInstance("pigou");
  const PerceivedCostContext ctx = Context(pigou, 0.0);
  EXPECT_TRUE(
      VerifyNash(ctx, FlowAssignment::FromPathFlows(pigou.problem, {{1, 0}}), 1e-6)
          .ok());
  const DeviationReport report = VerifyNash(
      ctx, FlowAssignment::FromPathFlows(pigou.problem, {{0.5, 0.5}}), 1e-6);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].path, 1);
  EXPECT_DOUBLE_EQ(report.violations[0].cost, 1.0);
  EXPECT_DOUBLE_EQ(report.violations[0].min_cost, 0.5);
  EXPECT_DOUBLE_EQ(report.max_excess(), 0.5);
}

TEST(VerifyNash, SinglePathCommodityAlwaysOk) {
  Instance single;
  single.problem.nodes = {"s", "t"};
  single.problem.edges = {{0, 1, {3.0, 2, 1.0}}};
  single.problem.commodities = {{0, 1, 2.0, {{0}}}};
  single.profile.classes = {{{0.2, 0.5}, {0.9, 1.5}}};
  const PerceivedCostContext ctx = Context(single, 0.7);
  EXPECT_TRUE(VerifyNash(ctx, FlowAssignment(single.problem, {{{0.5}, {1.5}}}), 0.0)
                  .ok());
}

}  // namespace
}  // namespace slowroute
