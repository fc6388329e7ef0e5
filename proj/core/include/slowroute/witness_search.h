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

#ifndef SLOWROUTE_WITNESS_SEARCH_H_
#define SLOWROUTE_WITNESS_SEARCH_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "slowroute/analysis.h"

namespace slowroute {

enum class FamilyKind { kTwoLinkParallel, kKLinkParallel, kBraess };
enum class SearchStrategy { kGrid, kRandom };

std::string_view FamilyKindName(FamilyKind kind);
std::optional<FamilyKind> ParseFamilyKind(std::string_view name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double At(double u) const { return lo + (hi - lo) * u; }
};

// A parameterized set of instances. Every edge gets latency a * x^degree + b
// with a, b drawn from the ranges. The main commodity carries `rate`; each
// class gets a beta from its range and a share of the rate.
//
// Braess instances use nodes s, v, w, t with edges s-v, s-w, v-w, v-t, w-t.
// When auxiliary_rate.hi > 0 a second commodity v -> t is added with the
// same class betas and its own shares.
struct WitnessFamily {
  FamilyKind kind = FamilyKind::kTwoLinkParallel;
  int degree = 1;
  int links = 3;  // k-link only
  Range a{0.0, 2.0};
  Range b{0.0, 2.0};
  Range rate{1.0, 1.0};
  Range auxiliary_rate{0.0, 0.0};
  std::vector<Range> class_betas{{0.0, 1.0}, {0.0, 1.0}};

  SearchStrategy strategy = SearchStrategy::kRandom;
  std::uint64_t seed = 0;
  int budget = 1000;
  // Random strategy: share of the budget spent perturbing the incumbent.
  double refine_fraction = 0.6;
  int workers = 1;
};

struct WitnessCandidate {
  RoutingProblem problem;
  SensitivityProfile profile;
};

// Number of unit-cube coordinates describing one instance of the family.
int FamilyDimension(const WitnessFamily& family);

// Maps a point of [0,1]^FamilyDimension to an instance.
WitnessCandidate BuildCandidate(const WitnessFamily& family,
                                const std::vector<double>& unit);

struct WitnessSearchResult {
  // Unset when no candidate could be evaluated.
  std::optional<PerversityRecord> best;
  WitnessCandidate witness;
  int best_index = -1;
  int evaluated = 0;
  int failed = 0;
  // Candidates with ratio > 1 + 1e-9.
  int perverse = 0;
  // Ratio of every candidate in evaluation order; NaN for failed ones.
  std::vector<double> ratios;
};

// Evaluates exactly `family.budget` candidates and keeps the one with the
// largest perversity ratio (earliest on ties). Results do not depend on the
// worker count.
WitnessSearchResult SearchPerverseWitness(const WitnessFamily& family,
                                          double gamma,
                                          const SolverConfig& config = {});

}  // namespace slowroute

#endif  // SLOWROUTE_WITNESS_SEARCH_H_
