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

#ifndef SLOWROUTE_NETWORK_H_
#define SLOWROUTE_NETWORK_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slowroute {

// Edge latency a * x^degree + b. Only this monomial-plus-constant family is
// supported; it is nondecreasing, convex and C^1 on [0, inf) whenever
// a >= 0, b >= 0 and degree >= 1.
struct LatencyFunction {
  double a = 0.0;
  int degree = 1;
  double b = 0.0;

  double operator()(double x) const;
  // Free-flow latency; equals b exactly.
  double FreeFlow() const { return b; }
  // d/dx of the latency.
  double Derivative(double x) const;
  // Integral of the latency over [0, x].
  double Integral(double x) const;
  // The congestion-dependent part a * x^degree.
  double Congestion(double x) const;

  friend bool operator==(const LatencyFunction&,
                         const LatencyFunction&) = default;
};

struct Edge {
  int tail = 0;
  int head = 0;
  LatencyFunction latency;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// A path is the ordered list of edge indices it traverses.
using Path = std::vector<int>;

struct Commodity {
  int source = 0;
  int sink = 0;
  double rate = 0.0;
  std::vector<Path> paths;

  friend bool operator==(const Commodity&, const Commodity&) = default;
};

struct RoutingProblem {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<Commodity> commodities;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_commodities() const { return static_cast<int>(commodities.size()); }
  double TotalRate() const;
  // Index of the node with the given id, or -1.
  int NodeIndex(const std::string& id) const;
  // The common degree of all edges, or 0 when degrees differ (or no edges).
  int UniformDegree() const;

  friend bool operator==(const RoutingProblem&,
                         const RoutingProblem&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string ToString() const;
};

ValidationReport ValidateProblem(const RoutingProblem& problem);

inline constexpr int kDefaultPathsCap = 64;

// All simple source->sink paths, lexicographic by edge-index sequence.
// Throws kPathExplosion when more than `cap` paths exist and kNoPath when none
// exist.
std::vector<Path> EnumeratePaths(std::span<const std::string> nodes,
                                 std::span<const Edge> edges, int source,
                                 int sink, int cap = kDefaultPathsCap);

// Fills every commodity's path set from the graph. Existing paths are
// replaced.
void EnumerateAllPaths(RoutingProblem& problem, int cap = kDefaultPathsCap);

enum class NetworkClass { kParallel, kSymmetric, kGeneral };

struct ClassificationReport {
  bool parallel = false;
  bool symmetric = false;

  // Most specific label: parallel, then symmetric, then general.
  NetworkClass MostSpecific() const;
};

ClassificationReport ClassifyFlags(const RoutingProblem& problem);
NetworkClass Classify(const RoutingProblem& problem);
std::string_view NetworkClassName(NetworkClass c);

// Per-constraint feasibility tolerance, scaled by the total rate.
inline constexpr double kFeasibilityTolerance = 1e-9;

// [commodity][class][path] flows.
using ClassPathFlows = std::vector<std::vector<std::vector<double>>>;

// Class-disaggregated path flows together with the derived aggregate path
// and edge flows. Construction computes the derived quantities; the object is
// immutable afterwards.
class FlowAssignment {
 public:
  FlowAssignment() = default;
  FlowAssignment(const RoutingProblem& problem, ClassPathFlows class_flows);

  // One class per commodity carrying the given aggregate path flows.
  static FlowAssignment FromPathFlows(
      const RoutingProblem& problem,
      const std::vector<std::vector<double>>& path_flows);

  const ClassPathFlows& class_flows() const { return class_flows_; }
  double class_flow(int commodity, int cls, int path) const {
    return class_flows_[commodity][cls][path];
  }
  int num_classes(int commodity) const {
    return static_cast<int>(class_flows_[commodity].size());
  }
  // [commodity][path] aggregate over classes.
  const std::vector<std::vector<double>>& path_flows() const {
    return path_flows_;
  }
  const std::vector<double>& edge_flows() const { return edge_flows_; }

 private:
  ClassPathFlows class_flows_;
  std::vector<std::vector<double>> path_flows_;
  std::vector<double> edge_flows_;
};

// Checks shape, nonnegativity and per-commodity rate conservation. Throws
// kInfeasibleFlow on failure.
void CheckFeasible(const RoutingProblem& problem, const FlowAssignment& flow);

// Sum over edges of f_e * l_e(f_e).
double TotalLatency(const RoutingProblem& problem, const FlowAssignment& flow);

// Sum over paths of f_p * l_p(f); equal to TotalLatency up to rounding.
double TotalLatencyByPaths(const RoutingProblem& problem,
                           const FlowAssignment& flow);

double PathLatency(const RoutingProblem& problem, const Path& path,
                   std::span<const double> edge_flows);

}  // namespace slowroute

#endif  // SLOWROUTE_NETWORK_H_
