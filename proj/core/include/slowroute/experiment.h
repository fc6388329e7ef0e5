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

#ifndef SLOWROUTE_EXPERIMENT_H_
#define SLOWROUTE_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "slowroute/equilibrium.h"
#include "slowroute/instance_io.h"
#include "slowroute/witness_search.h"

namespace slowroute {

enum class OutputFormat { kCsv, kJson };

// Parses "lo:hi:step" into lo, lo + step, ... up to hi inclusive. Points are
// computed as lo + i * step and rounded to 12 decimals so that 0:1:0.1 ends
// exactly at 1. Throws kInvalidArgument.
std::vector<double> ParseGammaRange(std::string_view text);

struct ExperimentConfig {
  // A file path, or a builtin name with parameters when `builtin` is set.
  std::string instance;
  bool builtin = false;
  std::vector<double> gammas;
  SolverConfig solver;
  OutputFormat format = OutputFormat::kCsv;
  int paths_cap = kDefaultPathsCap;
  int workers = 1;
};

struct SweepRow {
  double gamma = 0.0;
  double latency_nf = 0.0;
  double latency_opt = 0.0;
  double poa_ratio = 0.0;
  double perversity_ratio = 0.0;
  // All three solves behind the row (at gamma, at 0, optimum) converged.
  bool converged = false;
  double relative_gap = 0.0;
  int iterations = 0;
  // Set when the row could not be computed; numeric fields are then NaN.
  std::string error;
};

inline constexpr std::string_view kSweepCsvHeader =
    "gamma,L_nf,L_opt,poa_ratio,perversity_ratio,converged,relative_gap,"
    "iterations";

// One row per gamma, sorted by gamma. Solver failures are recorded in the
// row instead of aborting the sweep.
std::vector<SweepRow> RunSweep(const Instance& instance,
                               std::vector<double> gammas,
                               const SolverConfig& solver, int workers = 1);

// Loads the instance named by the config and sweeps it.
std::vector<SweepRow> RunSweep(const ExperimentConfig& config);

std::string FormatSweepCsv(const std::vector<SweepRow>& rows);
std::string FormatSweepJson(const std::vector<SweepRow>& rows);

// Reads a family description:
//   {"kind": "braess", "degree": 1, "links": 3,
//    "a": [0, 2], "b": [0, 2], "rate": [1, 1], "auxiliary_rate": [0, 1.5],
//    "class_betas": [[0, 1], [0, 1]], "strategy": "random",
//    "seed": 0, "budget": 1000, "refine_fraction": 0.6}
// Every field is optional; missing ones take DefaultFamily(kind) values.
WitnessFamily ParseFamily(std::string_view text);

// Defaults used by the CLI: coefficient ranges [0, 2], unit rate, two
// classes with beta ranging over [0, 1]; Braess adds an auxiliary v -> t
// commodity with rate in [0, 1.5].
WitnessFamily DefaultFamily(FamilyKind kind);

// JSON report: the best witness as an instance document (with gamma), its
// perversity record, and a summary of the search trace.
std::string RunWitnessSearch(const WitnessFamily& family, double gamma,
                             const SolverConfig& solver);

}  // namespace slowroute

#endif  // SLOWROUTE_EXPERIMENT_H_
