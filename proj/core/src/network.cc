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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slowroute/error.h"

namespace slowroute {

double LatencyFunction::operator()(double x) const {
  return Congestion(x) + b;
}

double LatencyFunction::Congestion(double x) const {
  if (a == 0.0) return 0.0;
  return degree == 1 ? a * x : a * std::pow(x, degree);
}

double LatencyFunction::Derivative(double x) const {
  if (a == 0.0) return 0.0;
  return degree == 1 ? a : a * degree * std::pow(x, degree - 1);
}

double LatencyFunction::Integral(double x) const {
  return a * std::pow(x, degree + 1) / (degree + 1) + b * x;
}

double RoutingProblem::TotalRate() const {
  double total = 0.0;
  for (const Commodity& c : commodities) total += c.rate;
  return total;
}

int RoutingProblem::NodeIndex(const std::string& id) const {
  auto it = std::find(nodes.begin(), nodes.end(), id);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

int RoutingProblem::UniformDegree() const {
  if (edges.empty()) return 0;
  const int d = edges.front().latency.degree;
  for (const Edge& e : edges) {
    if (e.latency.degree != d) return 0;
  }
  return d;
}

std::string ValidationReport::ToString() const {
  std::ostringstream out;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) out << "; ";
    out << violations[i];
  }
  return out.str();
}

namespace {

// Appends a violation to `report` unless `path` is a simple walk from source
// to sink over valid edges.
void ValidatePath(const RoutingProblem& problem, int ci, int pi,
                  const Commodity& commodity, const Path& path,
                  ValidationReport& report) {
  std::ostringstream where;
  where << "commodity " << ci << " path " << pi;
  if (path.empty()) {
    report.violations.push_back(where.str() + ": empty path");
    return;
  }
  int at = commodity.source;
  std::set<int> seen = {at};
  for (int e : path) {
    if (e < 0 || e >= problem.num_edges()) {
      report.violations.push_back(where.str() + ": invalid edge index " +
                                  std::to_string(e));
      return;
    }
    const Edge& edge = problem.edges[e];
    if (edge.tail != at) {
      report.violations.push_back(where.str() +
                                  ": disconnected path at edge " +
                                  std::to_string(e));
      return;
    }
    at = edge.head;
    if (!seen.insert(at).second) {
      report.violations.push_back(where.str() + ": path repeats a node");
      return;
    }
  }
  if (at != commodity.sink) {
    report.violations.push_back(where.str() +
                                ": disconnected path (does not reach sink)");
  }
}

}  // namespace

ValidationReport ValidateProblem(const RoutingProblem& problem) {
  ValidationReport report;
  auto add = [&report](const std::string& v) {
    report.violations.push_back(v);
  };

  if (problem.nodes.empty()) add("problem has no nodes");
  {
    std::set<std::string> ids;
    for (const std::string& id : problem.nodes) {
      if (!ids.insert(id).second) add("duplicate node id '" + id + "'");
    }
  }

  for (int i = 0; i < problem.num_edges(); ++i) {
    const Edge& e = problem.edges[i];
    const std::string where = "edge " + std::to_string(i);
    if (e.tail < 0 || e.tail >= problem.num_nodes() || e.head < 0 ||
        e.head >= problem.num_nodes()) {
      add(where + ": endpoint out of range");
    }
    if (!std::isfinite(e.latency.a) || !std::isfinite(e.latency.b)) {
      add(where + ": non-finite coefficient");
    }
    if (e.latency.a < 0.0) add(where + ": negative coefficient a");
    if (e.latency.b < 0.0) add(where + ": negative coefficient b");
    if (e.latency.degree < 1) add(where + ": degree must be >= 1");
  }

  if (problem.commodities.empty()) add("problem has no commodities");
  for (int ci = 0; ci < problem.num_commodities(); ++ci) {
    const Commodity& c = problem.commodities[ci];
    const std::string where = "commodity " + std::to_string(ci);
    const bool endpoints_ok = c.source >= 0 && c.source < problem.num_nodes() &&
                              c.sink >= 0 && c.sink < problem.num_nodes();
    if (!endpoints_ok) add(where + ": endpoint out of range");
    if (!(std::isfinite(c.rate) && c.rate > 0.0)) {
      add(where + ": zero or negative rate");
    }
    if (c.paths.empty()) add(where + ": no paths");
    if (!endpoints_ok) continue;
    std::set<Path> distinct;
    for (int pi = 0; pi < static_cast<int>(c.paths.size()); ++pi) {
      ValidatePath(problem, ci, pi, c, c.paths[pi], report);
      if (!distinct.insert(c.paths[pi]).second) {
        add(where + " path " + std::to_string(pi) + ": duplicate path");
      }
    }
  }
  if (!problem.commodities.empty() && !(problem.TotalRate() > 0.0)) {
    add("total rate must be positive");
  }
  return report;
}

namespace {

struct PathSearch {
  std::span<const Edge> edges;
  std::vector<std::vector<int>> out_edges;
  int sink;
  int cap;
  std::vector<bool> on_path;
  Path current;
  std::vector<Path> found;

  void Visit(int node) {
    if (node == sink) {
      if (static_cast<int>(found.size()) >= cap) {
        throw Error(ErrorCode::kPathExplosion,
                    "more than " + std::to_string(cap) + " simple paths");
      }
      found.push_back(current);
      return;
    }
    for (int e : out_edges[node]) {
      const int next = edges[e].head;
      if (on_path[next]) continue;
      on_path[next] = true;
      current.push_back(e);
      Visit(next);
      current.pop_back();
      on_path[next] = false;
    }
  }
};

}  // namespace

std::vector<Path> EnumeratePaths(std::span<const std::string> nodes,
                                 std::span<const Edge> edges, int source,
                                 int sink, int cap) {
  const int n = static_cast<int>(nodes.size());
  if (cap < 1) throw Error(ErrorCode::kInvalidArgument, "paths cap must be >= 1");
  if (source < 0 || source >= n || sink < 0 || sink >= n) {
    throw Error(ErrorCode::kInvalidArgument, "source or sink out of range");
  }
  PathSearch search{edges, std::vector<std::vector<int>>(n), sink, cap,
                    std::vector<bool>(n, false), {}, {}};
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const Edge& edge = edges[e];
    if (edge.tail < 0 || edge.tail >= n || edge.head < 0 || edge.head >= n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge " + std::to_string(e) + " endpoint out of range");
    }
    search.out_edges[edge.tail].push_back(e);
  }
  if (source == sink) {
    throw Error(ErrorCode::kNoPath, "source equals sink");
  }
  search.on_path[source] = true;
  search.Visit(source);
  if (search.found.empty()) {
    throw Error(ErrorCode::kNoPath, "no path from " + nodes[source] + " to " +
                                        nodes[sink]);
  }
  return std::move(search.found);
}

void EnumerateAllPaths(RoutingProblem& problem, int cap) {
  for (Commodity& c : problem.commodities) {
    c.paths = EnumeratePaths(problem.nodes, problem.edges, c.source, c.sink,
                             cap);
  }
}

NetworkClass ClassificationReport::MostSpecific() const {
  if (parallel) return NetworkClass::kParallel;
  if (symmetric) return NetworkClass::kSymmetric;
  return NetworkClass::kGeneral;
}

ClassificationReport ClassifyFlags(const RoutingProblem& problem) {
  ClassificationReport report;
  report.symmetric = problem.num_commodities() == 1;
  if (problem.commodities.empty()) return report;

  const Commodity& first = problem.commodities.front();
  bool shared_endpoints = true;
  for (const Commodity& c : problem.commodities) {
    shared_endpoints = shared_endpoints && c.source == first.source &&
                       c.sink == first.sink;
  }
  if (!shared_endpoints) return report;

  // A path listed by several commodities is a single element of the union.
  std::set<Path> unique_paths;
  for (const Commodity& c : problem.commodities) {
    unique_paths.insert(c.paths.begin(), c.paths.end());
  }
  std::vector<int> owner(problem.num_edges(), -1);
  int index = 0;
  for (const Path& p : unique_paths) {
    for (int e : p) {
      if (owner[e] != -1 && owner[e] != index) return report;
      owner[e] = index;
    }
    ++index;
  }
  report.parallel = true;
  return report;
}

NetworkClass Classify(const RoutingProblem& problem) {
  return ClassifyFlags(problem).MostSpecific();
}

std::string_view NetworkClassName(NetworkClass c) {
  switch (c) {
    case NetworkClass::kParallel:
      return "parallel";
    case NetworkClass::kSymmetric:
      return "symmetric";
    case NetworkClass::kGeneral:
      return "general";
  }
  return "general";
}

FlowAssignment::FlowAssignment(const RoutingProblem& problem,
                               ClassPathFlows class_flows)
    : class_flows_(std::move(class_flows)) {
  if (static_cast<int>(class_flows_.size()) != problem.num_commodities()) {
    throw Error(ErrorCode::kInfeasibleFlow,
                "flow has wrong number of commodities");
  }
  edge_flows_.assign(problem.num_edges(), 0.0);
  path_flows_.resize(class_flows_.size());
  for (int c = 0; c < problem.num_commodities(); ++c) {
    const Commodity& commodity = problem.commodities[c];
    const size_t num_paths = commodity.paths.size();
    path_flows_[c].assign(num_paths, 0.0);
    for (const std::vector<double>& cls : class_flows_[c]) {
      if (cls.size() != num_paths) {
        throw Error(ErrorCode::kInfeasibleFlow,
                    "class flow vector has wrong number of paths");
      }
      for (size_t p = 0; p < num_paths; ++p) path_flows_[c][p] += cls[p];
    }
    for (size_t p = 0; p < num_paths; ++p) {
      for (int e : commodity.paths[p]) edge_flows_[e] += path_flows_[c][p];
    }
  }
}

FlowAssignment FlowAssignment::FromPathFlows(
    const RoutingProblem& problem,
    const std::vector<std::vector<double>>& path_flows) {
  ClassPathFlows class_flows;
  class_flows.reserve(path_flows.size());
  for (const auto& flows : path_flows) class_flows.push_back({flows});
  return FlowAssignment(problem, std::move(class_flows));
}

void CheckFeasible(const RoutingProblem& problem, const FlowAssignment& flow) {
  const double tol = kFeasibilityTolerance * problem.TotalRate();
  const ClassPathFlows& flows = flow.class_flows();
  if (static_cast<int>(flows.size()) != problem.num_commodities()) {
    throw Error(ErrorCode::kInfeasibleFlow, "commodity count mismatch");
  }
  for (int c = 0; c < problem.num_commodities(); ++c) {
    double sum = 0.0;
    for (const std::vector<double>& cls : flows[c]) {
      if (cls.size() != problem.commodities[c].paths.size()) {
        throw Error(ErrorCode::kInfeasibleFlow, "path count mismatch");
      }
      for (double f : cls) {
        if (!std::isfinite(f) || f < -tol) {
          throw Error(ErrorCode::kInfeasibleFlow,
                      "negative or non-finite path flow in commodity " +
                          std::to_string(c));
        }
        sum += f;
      }
    }
    if (std::abs(sum - problem.commodities[c].rate) > tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "commodity " << c << " routes " << sum << " but rate is "
          << problem.commodities[c].rate;
      throw Error(ErrorCode::kInfeasibleFlow, msg.str());
    }
  }
}

double TotalLatency(const RoutingProblem& problem, const FlowAssignment& flow) {
  CheckFeasible(problem, flow);
  double total = 0.0;
  const std::vector<double>& x = flow.edge_flows();
  for (int e = 0; e < problem.num_edges(); ++e) {
    total += x[e] * problem.edges[e].latency(x[e]);
  }
  return total;
}

double TotalLatencyByPaths(const RoutingProblem& problem,
                           const FlowAssignment& flow) {
  CheckFeasible(problem, flow);
  double total = 0.0;
  for (int c = 0; c < problem.num_commodities(); ++c) {
    const Commodity& commodity = problem.commodities[c];
    for (size_t p = 0; p < commodity.paths.size(); ++p) {
      total += flow.path_flows()[c][p] *
               PathLatency(problem, commodity.paths[p], flow.edge_flows());
    }
  }
  return total;
}

double PathLatency(const RoutingProblem& problem, const Path& path,
                   std::span<const double> edge_flows) {
  double latency = 0.0;
  for (int e : path) latency += problem.edges[e].latency(edge_flows[e]);
  return latency;
}

}  // namespace slowroute
