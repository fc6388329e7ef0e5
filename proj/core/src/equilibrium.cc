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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "slowroute/error.h"

namespace slowroute {

std::string_view CostModeName(CostMode mode) {
  return mode == CostMode::kSlowdown ? "slowdown" : "emulated-altruism";
}

PerceivedCostContext PerceivedCostContext::Create(RoutingProblem problem,
                                                  SensitivityProfile profile,
                                                  SignalPolicy signal,
                                                  CostMode mode) {
  const ValidationReport problem_report = ValidateProblem(problem);
  if (!problem_report.ok()) {
    throw Error(ErrorCode::kValidationError, problem_report.ToString());
  }
  profile.Canonicalize();
  const ValidationReport profile_report = ValidateProfile(problem, profile);
  if (!profile_report.ok()) {
    throw Error(ErrorCode::kValidationError, profile_report.ToString());
  }
  if (!(std::isfinite(signal.gamma) && signal.gamma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be finite and >= 0");
  }

  PerceivedCostContext context;
  context.degree_ = problem.UniformDegree();
  context.mode_ = mode;
  context.signal_ = signal;
  context.alpha_.resize(profile.classes.size());
  for (size_t c = 0; c < profile.classes.size(); ++c) {
    for (const SensitivityClass& cls : profile.classes[c]) {
      double alpha = std::numeric_limits<double>::quiet_NaN();
      if (mode == CostMode::kEmulatedAltruism) {
        if (context.degree_ == 0) {
          throw Error(ErrorCode::kPreconditionViolated,
                      "emulated-altruism mode needs a uniform edge degree");
        }
        alpha = BetaToAlpha(cls.beta, signal.gamma, context.degree_);
      }
      context.alpha_[c].push_back(alpha);
    }
  }
  context.problem_ = std::move(problem);
  context.profile_ = std::move(profile);
  return context;
}

double PerceivedCost(const PerceivedCostContext& context, int commodity,
                     int cls, int path, std::span<const double> edge_flows) {
  const RoutingProblem& problem = context.problem();
  const Path& edges = problem.commodities[commodity].paths[path];
  double cost = 0.0;
  if (context.mode() == CostMode::kSlowdown) {
    const double credit = context.gamma() * context.beta(commodity, cls);
    for (int e : edges) {
      const LatencyFunction& l = problem.edges[e].latency;
      cost += l(edge_flows[e]) - credit * l.FreeFlow();
    }
  } else {
    const double amplify =
        1.0 + context.degree() * context.alpha(commodity, cls);
    for (int e : edges) {
      const LatencyFunction& l = problem.edges[e].latency;
      cost += amplify * l.Congestion(edge_flows[e]) + l.b;
    }
  }
  return cost;
}

double Potential(const PerceivedCostContext& context,
                 const FlowAssignment& flow) {
  const RoutingProblem& problem = context.problem();
  CheckFeasible(problem, context.profile(), flow);
  const std::vector<double>& x = flow.edge_flows();
  const bool slowdown = context.mode() == CostMode::kSlowdown;

  double value = 0.0;
  for (int e = 0; e < problem.num_edges(); ++e) {
    const LatencyFunction& l = problem.edges[e].latency;
    value += slowdown ? l.Integral(x[e]) : l.Integral(x[e]) - l.b * x[e];
  }
  for (int c = 0; c < problem.num_commodities(); ++c) {
    const Commodity& commodity = problem.commodities[c];
    for (int k = 0; k < flow.num_classes(c); ++k) {
      const double weight =
          slowdown ? -context.gamma() * context.beta(c, k)
                   : 1.0 / (1.0 + context.degree() * context.alpha(c, k));
      for (size_t p = 0; p < commodity.paths.size(); ++p) {
        double free_flow = 0.0;
        for (int e : commodity.paths[p]) free_flow += problem.edges[e].latency.b;
        value += weight * flow.class_flow(c, k, static_cast<int>(p)) *
                 free_flow;
      }
    }
  }
  return value;
}

double DefaultWardropEpsilon(double relative_gap, double cost_scale) {
  return std::max(1e-8, 10.0 * relative_gap * cost_scale);
}

double DeviationReport::max_excess() const {
  double worst = 0.0;
  for (const Deviation& d : violations) worst = std::max(worst, d.excess());
  return worst;
}

namespace {

// Flow below mass * kUsedFraction does not count as "using" a path.
constexpr double kUsedFraction = 1e-9;
constexpr double kLineSearchTolerance = 1e-14;

// One simplex of the feasible product: a class of a commodity with its mass.
// The objective minimized is
//   sum_e s_e * a_e x_e^{d+1} / (d+1) + sum_blocks w_b sum_p f_p B_p
// with B_p the free-flow latency of path p and s_e = d+1 when minimizing
// total latency (s_e = 1 otherwise). Perceived costs are the gradient scaled
// by report_scale.
struct Block {
  int commodity = 0;
  int cls = 0;
  double mass = 0.0;
  double free_flow_weight = 1.0;
  double report_scale = 1.0;
};

struct Evaluation {
  double objective = 0.0;
  double gap = 0.0;
  double max_used_excess = 0.0;
  double cost_scale = 1.0;
  std::vector<int> argmin;
  std::vector<double> min_cost;  // reported units
};

class FrankWolfe {
 public:
  FrankWolfe(const RoutingProblem& problem, bool marginal,
             std::vector<Block> blocks, ClassPathFlows initial)
      : problem_(problem),
        marginal_(marginal),
        blocks_(std::move(blocks)),
        flows_(std::move(initial)),
        x_(problem.num_edges(), 0.0),
        mark_(problem.num_edges(), 0) {
    path_free_flow_.resize(problem.num_commodities());
    for (int c = 0; c < problem.num_commodities(); ++c) {
      for (const Path& p : problem.commodities[c].paths) {
        double b = 0.0;
        for (int e : p) b += problem.edges[e].latency.b;
        path_free_flow_[c].push_back(b);
      }
    }
  }

  EquilibriumResult Run(const SolverConfig& config) {
    if (!(config.tolerance > 0.0) || config.max_iterations < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "solver needs tolerance > 0 and max_iterations >= 1");
    }
    Evaluation best_eval;
    ClassPathFlows best_flows;
    double best_rel = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iteration = 0;
    for (;; ++iteration) {
      RecomputeEdgeFlows();
      Evaluation eval = Evaluate();
      const double rel = eval.gap / (std::abs(eval.objective) + 1.0);
      const bool done =
          rel <= config.tolerance &&
          eval.max_used_excess <= DefaultWardropEpsilon(rel, eval.cost_scale);
      const std::vector<int> argmin = eval.argmin;
      if (done || rel < best_rel) {
        best_rel = rel;
        best_eval = std::move(eval);
        best_flows = flows_;
      }
      if (done) {
        converged = true;
        break;
      }
      if (iteration >= config.max_iterations) break;
      FrankWolfeStep(argmin, iteration, config.step_rule);
      if (config.pairwise_moves) {
        PairwiseSweep();
        ExchangeSweep();
      }
    }
    flows_ = std::move(best_flows);
    return MakeResult(best_eval, best_rel, iteration, converged);
  }

 private:
  double EdgeGradient(int e, double x) const {
    const LatencyFunction& l = problem_.edges[e].latency;
    const double g = l.Congestion(std::max(x, 0.0));
    return marginal_ ? (l.degree + 1) * g : g;
  }

  double EdgeIntegral(int e, double x) const {
    const LatencyFunction& l = problem_.edges[e].latency;
    const double v = l.a * std::pow(std::max(x, 0.0), l.degree + 1);
    return marginal_ ? v : v / (l.degree + 1);
  }

  void RecomputeEdgeFlows() {
    std::fill(x_.begin(), x_.end(), 0.0);
    for (const Block& b : blocks_) {
      const auto& paths = problem_.commodities[b.commodity].paths;
      const auto& f = flows_[b.commodity][b.cls];
      for (size_t p = 0; p < paths.size(); ++p) {
        if (f[p] == 0.0) continue;
        for (int e : paths[p]) x_[e] += f[p];
      }
    }
  }

  double PathGradient(const Block& b, int p) const {
    double cost = b.free_flow_weight * path_free_flow_[b.commodity][p];
    for (int e : problem_.commodities[b.commodity].paths[p]) {
      cost += EdgeGradient(e, x_[e]);
    }
    return cost;
  }

  Evaluation Evaluate() const {
    Evaluation eval;
    for (int e = 0; e < problem_.num_edges(); ++e) {
      eval.objective += EdgeIntegral(e, x_[e]);
    }
    std::vector<double> costs;
    for (const Block& b : blocks_) {
      const auto& f = flows_[b.commodity][b.cls];
      const int n = static_cast<int>(f.size());
      costs.resize(n);
      int best = 0;
      for (int p = 0; p < n; ++p) {
        costs[p] = PathGradient(b, p);
        if (costs[p] < costs[best]) best = p;
        eval.objective += b.free_flow_weight *
                          path_free_flow_[b.commodity][p] * f[p];
      }
      for (int p = 0; p < n; ++p) {
        const double excess = costs[p] - costs[best];
        eval.gap += f[p] * excess;
        if (f[p] > b.mass * kUsedFraction) {
          eval.max_used_excess =
              std::max(eval.max_used_excess, b.report_scale * excess);
        }
      }
      const double reported = b.report_scale * costs[best];
      eval.argmin.push_back(best);
      eval.min_cost.push_back(reported);
      eval.cost_scale = std::max(eval.cost_scale, std::abs(reported));
    }
    eval.gap = std::max(eval.gap, 0.0);
    return eval;
  }

  // Moves toward the all-or-nothing assignment that routes every block on
  // its cheapest path.
  void FrankWolfeStep(const std::vector<int>& argmin, int iteration,
                      StepRule rule) {
    std::vector<double> dx(problem_.num_edges(), 0.0);
    double linear = 0.0;
    for (size_t i = 0; i < blocks_.size(); ++i) {
      const Block& b = blocks_[i];
      const auto& paths = problem_.commodities[b.commodity].paths;
      const auto& f = flows_[b.commodity][b.cls];
      for (size_t p = 0; p < paths.size(); ++p) {
        const double target = static_cast<int>(p) == argmin[i] ? b.mass : 0.0;
        const double delta = target - f[p];
        if (delta == 0.0) continue;
        linear += b.free_flow_weight * path_free_flow_[b.commodity][p] * delta;
        for (int e : paths[p]) dx[e] += delta;
      }
    }
    auto derivative = [&](double t) {
      double v = linear;
      for (int e = 0; e < problem_.num_edges(); ++e) {
        if (dx[e] != 0.0) v += EdgeGradient(e, x_[e] + t * dx[e]) * dx[e];
      }
      return v;
    };

    const double harmonic = 2.0 / (iteration + 2.0);
    double step = harmonic;
    if (rule == StepRule::kExactLineSearch) {
      const double at_one = derivative(1.0);
      if (!std::isfinite(at_one)) {
        step = harmonic;
      } else if (at_one <= 0.0) {
        step = 1.0;
      } else {
        double lo = 0.0;
        double hi = 1.0;
        while (hi - lo > kLineSearchTolerance) {
          const double mid = 0.5 * (lo + hi);
          if (derivative(mid) > 0.0) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        step = 0.5 * (lo + hi);
      }
    }
    if (step <= 0.0) return;

    for (size_t i = 0; i < blocks_.size(); ++i) {
      const Block& b = blocks_[i];
      auto& f = flows_[b.commodity][b.cls];
      for (size_t p = 0; p < f.size(); ++p) {
        const double target = static_cast<int>(p) == argmin[i] ? b.mass : 0.0;
        f[p] = (1.0 - step) * f[p] + step * target;
      }
    }
    for (int e = 0; e < problem_.num_edges(); ++e) {
      x_[e] = std::max(x_[e] + step * dx[e], 0.0);
    }
  }

  // For each block, shifts flow from its most expensive used path to its
  // cheapest path with an exact line search along that pair.
  void PairwiseSweep() {
    std::vector<int> plus;
    std::vector<int> minus;
    for (const Block& b : blocks_) {
      auto& f = flows_[b.commodity][b.cls];
      const auto& paths = problem_.commodities[b.commodity].paths;
      const int n = static_cast<int>(f.size());
      if (n < 2) continue;
      int cheap = 0;
      double cheap_cost = PathGradient(b, 0);
      int dear = -1;
      double dear_cost = -std::numeric_limits<double>::infinity();
      for (int p = 0; p < n; ++p) {
        const double c = p == 0 ? cheap_cost : PathGradient(b, p);
        if (c < cheap_cost) {
          cheap_cost = c;
          cheap = p;
        }
        if (f[p] > 0.0 && c > dear_cost) {
          dear_cost = c;
          dear = p;
        }
      }
      if (dear < 0 || dear == cheap || !(dear_cost > cheap_cost)) continue;

      plus.clear();
      minus.clear();
      for (int e : paths[cheap]) ++mark_[e];
      for (int e : paths[dear]) --mark_[e];
      bool all_linear = true;
      double curvature = 0.0;
      auto collect = [&](const Path& path) {
        for (int e : path) {
          if (mark_[e] == 0) continue;
          (mark_[e] > 0 ? plus : minus).push_back(e);
          mark_[e] = 0;
          const LatencyFunction& l = problem_.edges[e].latency;
          if (l.degree != 1) all_linear = false;
          curvature += marginal_ ? 2.0 * l.a : l.a;
        }
      };
      collect(paths[cheap]);
      collect(paths[dear]);

      const double constant =
          b.free_flow_weight * (path_free_flow_[b.commodity][cheap] -
                                path_free_flow_[b.commodity][dear]);
      auto derivative = [&](double t) {
        double v = constant;
        for (int e : plus) v += EdgeGradient(e, x_[e] + t);
        for (int e : minus) v -= EdgeGradient(e, x_[e] - t);
        return v;
      };

      const double available = f[dear];
      double shift = available;
      if (derivative(available) > 0.0) {
        if (all_linear && curvature > 0.0) {
          shift = std::clamp((dear_cost - cheap_cost) / curvature, 0.0,
                             available);
        } else {
          double lo = 0.0;
          double hi = available;
          const double tol = kLineSearchTolerance * std::max(b.mass, 1.0);
          while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (derivative(mid) > 0.0) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          shift = 0.5 * (lo + hi);
        }
      }
      if (shift <= 0.0) continue;
      if (shift >= available) {
        shift = available;
        f[dear] = 0.0;
      } else {
        f[dear] -= shift;
      }
      f[cheap] += shift;
      for (int e : plus) x_[e] += shift;
      for (int e : minus) x_[e] = std::max(x_[e] - shift, 0.0);
    }
  }

  // Two classes of one commodity trade flow between a pair of paths. Edge
  // flows stay put, so the objective is linear along the move and the best
  // step swaps as much as either side holds. Pairwise moves alone crawl here
  // when classes have nearly equal weights.
  void ExchangeSweep() {
    for (size_t i = 0; i < blocks_.size(); ++i) {
      for (size_t j = i + 1; j < blocks_.size(); ++j) {
        const Block& bi = blocks_[i];
        const Block& bj = blocks_[j];
        if (bi.commodity != bj.commodity) continue;
        const double dw = bi.free_flow_weight - bj.free_flow_weight;
        if (dw == 0.0) continue;
        auto& fi = flows_[bi.commodity][bi.cls];
        auto& fj = flows_[bj.commodity][bj.cls];
        const auto& free_flow = path_free_flow_[bi.commodity];
        const int n = static_cast<int>(fi.size());
        for (int p = 0; p < n; ++p) {
          for (int q = 0; q < n; ++q) {
            // Block i moves p -> q, block j moves q -> p.
            if (p == q || fi[p] <= 0.0 || fj[q] <= 0.0) continue;
            if (!(dw * (free_flow[q] - free_flow[p]) < 0.0)) continue;
            const double shift = std::min(fi[p], fj[q]);
            fi[p] -= shift;
            fi[q] += shift;
            fj[q] -= shift;
            fj[p] += shift;
            if (fi[p] < 0.0) fi[p] = 0.0;
            if (fj[q] < 0.0) fj[q] = 0.0;
          }
        }
      }
    }
  }

  EquilibriumResult MakeResult(const Evaluation& eval, double rel,
                               int iterations, bool converged) {
    EquilibriumResult result;
    result.flow = FlowAssignment(problem_, flows_);
    result.potential_value = eval.objective;
    result.relative_gap = rel;
    result.iterations = iterations;
    result.total_latency = TotalLatency(problem_, result.flow);
    result.converged = converged;
    result.cost_scale = eval.cost_scale;
    result.wardrop_epsilon = DefaultWardropEpsilon(rel, eval.cost_scale);
    result.per_class_min_cost.resize(problem_.num_commodities());
    for (size_t i = 0; i < blocks_.size(); ++i) {
      result.per_class_min_cost[blocks_[i].commodity].push_back(
          eval.min_cost[i]);
    }
    for (const Edge& e : problem_.edges) {
      if (e.latency.a == 0.0) result.possibly_non_unique = true;
    }
    if (result.possibly_non_unique) {
      result.diagnostics.push_back(
          "possibly non-unique: some edges have constant latency");
    }
    if (!converged) {
      char gap[32];
      std::snprintf(gap, sizeof gap, "%.3e", rel);
      result.diagnostics.push_back(std::string("not converged: relative gap ") +
                                   gap);
    }
    return result;
  }

  const RoutingProblem& problem_;
  bool marginal_;
  std::vector<Block> blocks_;
  std::vector<std::vector<double>> path_free_flow_;
  ClassPathFlows flows_;
  std::vector<double> x_;
  std::vector<int> mark_;
};

std::vector<Block> NashBlocks(const PerceivedCostContext& context) {
  std::vector<Block> blocks;
  const SensitivityProfile& profile = context.profile();
  for (int c = 0; c < profile.num_commodities(); ++c) {
    for (int k = 0; k < static_cast<int>(profile.classes[c].size()); ++k) {
      Block b;
      b.commodity = c;
      b.cls = k;
      b.mass = profile.classes[c][k].mass;
      if (context.mode() == CostMode::kSlowdown) {
        b.free_flow_weight = 1.0 - context.gamma() * context.beta(c, k);
        b.report_scale = 1.0;
      } else {
        const double amplify = 1.0 + context.degree() * context.alpha(c, k);
        b.free_flow_weight = 1.0 / amplify;
        b.report_scale = amplify;
      }
      blocks.push_back(b);
    }
  }
  return blocks;
}

ClassPathFlows InitialFlows(const RoutingProblem& problem,
                            const std::vector<Block>& blocks,
                            const SolverConfig& config) {
  ClassPathFlows flows(problem.num_commodities());
  std::mt19937_64 rng(config.seed);
  std::exponential_distribution<double> weight(1.0);
  for (const Block& b : blocks) {
    const size_t n = problem.commodities[b.commodity].paths.size();
    std::vector<double> f(n, 0.0);
    if (config.initialization == Initialization::kLowestIndexPath) {
      f[0] = b.mass;
    } else {
      double total = 0.0;
      for (double& v : f) total += (v = weight(rng));
      for (double& v : f) v *= b.mass / total;
    }
    auto& slot = flows[b.commodity];
    if (static_cast<int>(slot.size()) <= b.cls) slot.resize(b.cls + 1);
    slot[b.cls] = std::move(f);
  }
  return flows;
}

}  // namespace

EquilibriumResult SolveNash(const PerceivedCostContext& context,
                            const SolverConfig& config) {
  std::vector<Block> blocks = NashBlocks(context);
  ClassPathFlows initial = InitialFlows(context.problem(), blocks, config);
  FrankWolfe solver(context.problem(), /*marginal=*/false, std::move(blocks),
                    std::move(initial));
  return solver.Run(config);
}

EquilibriumResult SolveNash(const PerceivedCostContext& context,
                            const SolverConfig& config,
                            const FlowAssignment& initial) {
  CheckFeasible(context.problem(), context.profile(), initial);
  ClassPathFlows flows = initial.class_flows();
  for (auto& commodity : flows) {
    for (auto& cls : commodity) {
      for (double& f : cls) f = std::max(f, 0.0);
    }
  }
  FrankWolfe solver(context.problem(), /*marginal=*/false, NashBlocks(context),
                    std::move(flows));
  return solver.Run(config);
}

EquilibriumResult SolveOptimum(const RoutingProblem& problem,
                               const SolverConfig& config) {
  const ValidationReport report = ValidateProblem(problem);
  if (!report.ok()) throw Error(ErrorCode::kValidationError, report.ToString());
  std::vector<Block> blocks;
  for (int c = 0; c < problem.num_commodities(); ++c) {
    Block b;
    b.commodity = c;
    b.mass = problem.commodities[c].rate;
    blocks.push_back(b);
  }
  ClassPathFlows initial = InitialFlows(problem, blocks, config);
  FrankWolfe solver(problem, /*marginal=*/true, std::move(blocks),
                    std::move(initial));
  return solver.Run(config);
}

DeviationReport VerifyNash(const PerceivedCostContext& context,
                           const FlowAssignment& flow, double epsilon) {
  const RoutingProblem& problem = context.problem();
  CheckFeasible(problem, context.profile(), flow);
  DeviationReport report;
  std::vector<double> costs;
  for (int c = 0; c < problem.num_commodities(); ++c) {
    const int n = static_cast<int>(problem.commodities[c].paths.size());
    for (int k = 0; k < flow.num_classes(c); ++k) {
      const double mass = context.profile().classes[c][k].mass;
      costs.resize(n);
      double min_cost = std::numeric_limits<double>::infinity();
      for (int p = 0; p < n; ++p) {
        costs[p] = PerceivedCost(context, c, k, p, flow.edge_flows());
        min_cost = std::min(min_cost, costs[p]);
      }
      for (int p = 0; p < n; ++p) {
        const double f = flow.class_flow(c, k, p);
        if (f > mass * kUsedFraction && costs[p] > min_cost + epsilon) {
          report.violations.push_back({c, k, p, f, costs[p], min_cost});
        }
      }
    }
  }
  return report;
}

}  // namespace slowroute
