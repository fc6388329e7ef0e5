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

#include "slowroute/witness_search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "parallel.h"
#include "slowroute/error.h"

namespace slowroute {

namespace {

constexpr double kPerverseMargin = 1e-9;
constexpr double kShareFloor = 1e-3;
constexpr int kRefineBatch = 16;

int NumEdges(const WitnessFamily& family) {
  switch (family.kind) {
    case FamilyKind::kTwoLinkParallel:
      return 2;
    case FamilyKind::kKLinkParallel:
      return family.links;
    case FamilyKind::kBraess:
      return 5;
  }
  return 0;
}

bool HasAuxiliary(const WitnessFamily& family) {
  return family.kind == FamilyKind::kBraess && family.auxiliary_rate.hi > 0.0;
}

void CheckFamily(const WitnessFamily& family) {
  auto bad = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidArgument, msg);
  };
  if (family.degree < 1) bad("degree must be >= 1");
  if (family.kind == FamilyKind::kKLinkParallel && family.links < 2) {
    bad("k-link family needs at least 2 links");
  }
  if (family.class_betas.empty()) bad("family needs at least one class");
  if (family.budget < 1) bad("budget must be >= 1");
  if (family.workers < 1) bad("workers must be >= 1");
  if (family.a.lo < 0 || family.a.hi < family.a.lo) bad("bad range for a");
  if (family.b.lo < 0 || family.b.hi < family.b.lo) bad("bad range for b");
  if (family.rate.lo <= 0 || family.rate.hi < family.rate.lo) {
    bad("bad range for rate");
  }
  if (family.auxiliary_rate.lo < 0 ||
      family.auxiliary_rate.hi < family.auxiliary_rate.lo) {
    bad("bad range for auxiliary rate");
  }
  for (const Range& r : family.class_betas) {
    if (r.lo < 0 || r.hi > 1 || r.hi < r.lo) bad("bad beta range");
  }
  if (!(family.refine_fraction >= 0 && family.refine_fraction <= 1)) {
    bad("refine_fraction must be in [0, 1]");
  }
}

std::vector<SensitivityClass> SplitRate(double rate,
                                        const std::vector<double>& betas,
                                        const double* shares) {
  double total = 0.0;
  for (std::size_t k = 0; k < betas.size(); ++k) total += shares[k] + kShareFloor;
  std::vector<SensitivityClass> classes;
  double assigned = 0.0;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    const double mass = k + 1 == betas.size()
                            ? rate - assigned
                            : rate * (shares[k] + kShareFloor) / total;
    assigned += mass;
    classes.push_back({betas[k], mass});
  }
  return classes;
}

struct Evaluation {
  bool ok = false;
  PerversityRecord record;
};

Evaluation Evaluate(const WitnessFamily& family, const std::vector<double>& unit,
                    double gamma, const SolverConfig& config) {
  Evaluation out;
  try {
    const WitnessCandidate candidate = BuildCandidate(family, unit);
    out.record =
        PerversityRatio(candidate.problem, candidate.profile, gamma, config);
    out.ok = std::isfinite(out.record.ratio);
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

std::vector<Evaluation> EvaluateBatch(
    const WitnessFamily& family, const std::vector<std::vector<double>>& batch,
    double gamma, const SolverConfig& config) {
  std::vector<Evaluation> results(batch.size());
  internal::ParallelFor(batch.size(), family.workers, [&](std::size_t i) {
    results[i] = Evaluate(family, batch[i], gamma, config);
  });
  return results;
}

class Search {
 public:
  Search(const WitnessFamily& family, double gamma, const SolverConfig& config)
      : family_(family), gamma_(gamma), config_(config) {}

  // Evaluates a batch and folds it into the running result. Returns true if
  // the incumbent improved.
  bool Run(const std::vector<std::vector<double>>& batch) {
    const std::vector<Evaluation> evals =
        EvaluateBatch(family_, batch, gamma_, config_);
    bool improved = false;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int index = result_.evaluated++;
      if (!evals[i].ok) {
        ++result_.failed;
        result_.ratios.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const PerversityRecord& record = evals[i].record;
      result_.ratios.push_back(record.ratio);
      if (record.ratio > 1.0 + kPerverseMargin) ++result_.perverse;
      if (!result_.best || record.ratio > result_.best->ratio) {
        result_.best = record;
        result_.best_index = index;
        best_unit_ = batch[i];
        improved = true;
      }
    }
    return improved;
  }

  const std::vector<double>& best_unit() const { return best_unit_; }
  bool has_best() const { return result_.best.has_value(); }

  WitnessSearchResult Finish() {
    if (result_.best) {
      result_.witness = BuildCandidate(family_, best_unit_);
      result_.best->instance_id = result_.witness.problem.name;
    }
    return std::move(result_);
  }

 private:
  const WitnessFamily& family_;
  double gamma_;
  const SolverConfig& config_;
  WitnessSearchResult result_;
  std::vector<double> best_unit_;
};

WitnessSearchResult GridSearch(const WitnessFamily& family, double gamma,
                               const SolverConfig& config) {
  const int dim = FamilyDimension(family);
  int per_axis = 2;
  while (std::pow(per_axis + 1, dim) <= family.budget) ++per_axis;
  Search search(family, gamma, config);
  std::vector<int> digits(dim, 0);
  std::vector<std::vector<double>> batch;
  for (int n = 0; n < family.budget; ++n) {
    std::vector<double> unit(dim);
    for (int j = 0; j < dim; ++j) {
      unit[j] = static_cast<double>(digits[j]) / (per_axis - 1);
    }
    batch.push_back(std::move(unit));
    // Odometer increment, last coordinate fastest; wraps if the budget
    // exceeds the grid.
    for (int j = dim - 1; j >= 0; --j) {
      if (++digits[j] < per_axis) break;
      digits[j] = 0;
    }
  }
  search.Run(batch);
  return search.Finish();
}

WitnessSearchResult RandomSearch(const WitnessFamily& family, double gamma,
                                 const SolverConfig& config) {
  const int dim = FamilyDimension(family);
  std::mt19937_64 rng(family.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Search search(family, gamma, config);

  const int refine = static_cast<int>(
      std::floor(family.budget * family.refine_fraction));
  const int explore = std::max(1, family.budget - refine);
  std::vector<std::vector<double>> batch(explore, std::vector<double>(dim));
  for (auto& unit : batch) {
    for (double& u : unit) u = uniform(rng);
  }
  search.Run(batch);

  double sigma = 0.15;
  int remaining = family.budget - explore;
  std::normal_distribution<double> normal(0.0, 1.0);
  while (remaining > 0) {
    const int size = std::min(kRefineBatch, remaining);
    batch.assign(size, std::vector<double>(dim));
    const bool anchored = search.has_best();
    for (auto& unit : batch) {
      if (!anchored) {
        for (double& u : unit) u = uniform(rng);
        continue;
      }
      unit = search.best_unit();
      // Perturb a random subset of coordinates, at least one.
      const int forced = static_cast<int>(uniform(rng) * dim) % dim;
      for (int j = 0; j < dim; ++j) {
        if (j != forced && uniform(rng) > 0.35) continue;
        unit[j] = std::clamp(unit[j] + sigma * normal(rng), 0.0, 1.0);
      }
    }
    if (!search.Run(batch)) sigma = std::max(sigma * 0.7, 1e-3);
    remaining -= size;
  }
  return search.Finish();
}

}  // namespace

std::string_view FamilyKindName(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kTwoLinkParallel:
      return "two-link";
    case FamilyKind::kKLinkParallel:
      return "k-link";
    case FamilyKind::kBraess:
      return "braess";
  }
  return "unknown";
}

std::optional<FamilyKind> ParseFamilyKind(std::string_view name) {
  for (FamilyKind kind : {FamilyKind::kTwoLinkParallel,
                          FamilyKind::kKLinkParallel, FamilyKind::kBraess}) {
    if (FamilyKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

int FamilyDimension(const WitnessFamily& family) {
  const int classes = static_cast<int>(family.class_betas.size());
  int dim = 2 * NumEdges(family) + 1 + 2 * classes;
  if (HasAuxiliary(family)) dim += 1 + classes;
  return dim;
}

WitnessCandidate BuildCandidate(const WitnessFamily& family,
                                const std::vector<double>& unit) {
  CheckFamily(family);
  if (static_cast<int>(unit.size()) != FamilyDimension(family)) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(FamilyDimension(family)) +
                    " coordinates, got " + std::to_string(unit.size()));
  }
  const int edges = NumEdges(family);
  const int classes = static_cast<int>(family.class_betas.size());
  const double* u = unit.data();

  WitnessCandidate out;
  RoutingProblem& problem = out.problem;
  problem.name = std::string(FamilyKindName(family.kind)) + "-witness";
  if (family.kind == FamilyKind::kBraess) {
    problem.nodes = {"s", "v", "w", "t"};
    const int ends[5][2] = {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& e : ends) problem.edges.push_back({e[0], e[1], {}});
  } else {
    problem.nodes = {"s", "t"};
    for (int e = 0; e < edges; ++e) problem.edges.push_back({0, 1, {}});
  }
  for (int e = 0; e < edges; ++e) {
    problem.edges[e].latency = {family.a.At(u[0]), family.degree,
                                family.b.At(u[1])};
    u += 2;
  }
  const double rate = family.rate.At(*u++);
  std::vector<double> betas(classes);
  for (int k = 0; k < classes; ++k) betas[k] = family.class_betas[k].At(*u++);
  const double* shares = u;
  u += classes;

  problem.commodities.push_back({0, problem.num_nodes() - 1, rate, {}});
  out.profile.classes.push_back(SplitRate(rate, betas, shares));
  if (HasAuxiliary(family)) {
    const double aux = family.auxiliary_rate.At(*u++);
    if (aux > 0.0) {
      problem.commodities.push_back({1, 3, aux, {}});
      out.profile.classes.push_back(SplitRate(aux, betas, u));
    }
  }
  EnumerateAllPaths(problem);
  out.profile.Canonicalize();
  return out;
}

WitnessSearchResult SearchPerverseWitness(const WitnessFamily& family,
                                          double gamma,
                                          const SolverConfig& config) {
  CheckFamily(family);
  if (!(gamma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  }
  return family.strategy == SearchStrategy::kGrid
             ? GridSearch(family, gamma, config)
             : RandomSearch(family, gamma, config);
}

}  // namespace slowroute
