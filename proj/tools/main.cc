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

// Command-line front end: solve, optimum, sweep, search, verify, builtin.
//
// Exit codes: 0 success, 1 bad input or failed verification, 2 a solve did
// not converge.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slowroute/analysis.h"
#include "slowroute/equilibrium.h"
#include "slowroute/error.h"
#include "slowroute/experiment.h"
#include "slowroute/instance_io.h"
#include "slowroute/network.h"
#include "slowroute/population.h"
#include "slowroute/witness_search.h"

namespace {

using Json = nlohmann::json;
using namespace slowroute;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

struct Options {
  std::string instance;
  std::string builtin;
  std::optional<double> gamma;
  std::string gamma_range;
  double tol = 1e-9;
  int max_iters = 200000;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  int paths_cap = kDefaultPathsCap;
  int workers = 1;
  std::string mode = "slowdown";

  // verify
  std::string flow;
  std::optional<double> eps;

  // search
  std::string family = "two-link";
  std::string family_config;
  int budget = 1000;
  std::optional<int> degree;
  std::optional<int> links;
  std::optional<int> classes;
  std::string strategy;

  // builtin
  std::string name;
  bool list = false;
};

SolverConfig Solver(const Options& o) {
  SolverConfig config;
  config.tolerance = o.tol;
  config.max_iterations = o.max_iters;
  config.seed = o.seed;
  return config;
}

Instance Load(const Options& o) {
  if (o.instance.empty() == o.builtin.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "give exactly one of --instance or --builtin");
  }
  return o.builtin.empty() ? LoadInstance(o.instance, {o.paths_cap})
                           : BuiltinInstance(o.builtin);
}

double Gamma(const Options& o, const Instance& instance) {
  if (o.gamma) return *o.gamma;
  return instance.gamma.value_or(0.0);
}

CostMode Mode(const Options& o) {
  if (o.mode == "slowdown") return CostMode::kSlowdown;
  if (o.mode == "emulated") return CostMode::kEmulatedAltruism;
  throw Error(ErrorCode::kInvalidArgument, "--mode must be slowdown or emulated");
}

void Write(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + o.out);
  file << text;
}

std::string ResultJson(const RoutingProblem& problem,
                       const EquilibriumResult& r, std::optional<double> gamma) {
  Json doc = {{"instance", problem.name},
              {"converged", r.converged},
              {"relative_gap", r.relative_gap},
              {"iterations", r.iterations},
              {"total_latency", r.total_latency},
              {"potential", r.potential_value},
              {"cost_scale", r.cost_scale},
              {"wardrop_epsilon", r.wardrop_epsilon},
              {"possibly_non_unique", r.possibly_non_unique},
              {"per_class_min_cost", r.per_class_min_cost},
              {"class_flows", r.flow.class_flows()},
              {"edge_flows", r.flow.edge_flows()},
              {"diagnostics", r.diagnostics}};
  if (gamma) doc["gamma"] = *gamma;
  return doc.dump(2) + "\n";
}

// One row per (commodity, class, path).
std::string ResultCsv(const RoutingProblem& problem, const EquilibriumResult& r,
                      const SensitivityProfile* profile) {
  std::ostringstream out;
  out << "commodity,class,beta,path,flow\n";
  for (int c = 0; c < problem.num_commodities(); ++c) {
    for (int k = 0; k < r.flow.num_classes(c); ++k) {
      const double beta =
          profile ? profile->classes[c][k].beta
                  : std::numeric_limits<double>::quiet_NaN();
      for (std::size_t p = 0; p < problem.commodities[c].paths.size(); ++p) {
        out << c << ',' << k << ',' << FormatNumber(beta) << ',' << p << ','
            << FormatNumber(r.flow.class_flow(c, k, static_cast<int>(p)))
            << "\n";
      }
    }
  }
  out << "# total_latency=" << FormatNumber(r.total_latency)
      << " relative_gap=" << FormatNumber(r.relative_gap)
      << " iterations=" << r.iterations
      << " converged=" << (r.converged ? "true" : "false") << "\n";
  return out.str();
}

int ConvergenceExit(const EquilibriumResult& result) {
  if (result.converged) return kExitOk;
  std::cerr << "warning: solver stopped after " << result.iterations
            << " iterations at relative gap " << result.relative_gap << "\n";
  return kExitNotConverged;
}

int RunSolve(const Options& o) {
  const Instance instance = Load(o);
  const double gamma = Gamma(o, instance);
  const PerceivedCostContext context = PerceivedCostContext::Create(
      instance.problem, instance.profile, {gamma}, Mode(o));
  const EquilibriumResult result = SolveNash(context, Solver(o));
  Write(o, o.format == "json"
               ? ResultJson(instance.problem, result, gamma)
               : ResultCsv(instance.problem, result, &context.profile()));
  return ConvergenceExit(result);
}

int RunOptimum(const Options& o) {
  const Instance instance = Load(o);
  const EquilibriumResult result = SolveOptimum(instance.problem, Solver(o));
  Write(o, o.format == "json" ? ResultJson(instance.problem, result, {})
                              : ResultCsv(instance.problem, result, nullptr));
  return ConvergenceExit(result);
}

int RunSweepCommand(const Options& o) {
  const Instance instance = Load(o);
  std::vector<double> gammas;
  if (!o.gamma_range.empty()) {
    gammas = ParseGammaRange(o.gamma_range);
  } else {
    gammas.push_back(Gamma(o, instance));
  }
  const std::vector<SweepRow> rows =
      RunSweep(instance, gammas, Solver(o), o.workers);
  Write(o, o.format == "json" ? FormatSweepJson(rows) : FormatSweepCsv(rows));
  for (const SweepRow& row : rows) {
    if (!row.converged) {
      std::cerr << "warning: gamma " << FormatNumber(row.gamma)
                << (row.error.empty() ? " did not converge" : ": " + row.error)
                << "\n";
      return kExitNotConverged;
    }
  }
  return kExitOk;
}

int RunSearch(const Options& o) {
  WitnessFamily family;
  if (!o.family_config.empty()) {
    std::ifstream in(o.family_config, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::kParseError, "cannot open " + o.family_config);
    }
    std::ostringstream text;
    text << in.rdbuf();
    family = ParseFamily(text.str());
  } else {
    const std::optional<FamilyKind> kind = ParseFamilyKind(o.family);
    if (!kind) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--family must be two-link, k-link or braess");
    }
    family = DefaultFamily(*kind);
    family.budget = o.budget;
    family.seed = o.seed;
  }
  if (o.degree) family.degree = *o.degree;
  if (o.links) family.links = *o.links;
  if (o.classes) family.class_betas.assign(*o.classes, Range{0.0, 1.0});
  if (o.strategy == "grid") family.strategy = SearchStrategy::kGrid;
  if (o.strategy == "random") family.strategy = SearchStrategy::kRandom;
  family.workers = o.workers;

  const double gamma = o.gamma.value_or(0.5);
  const std::string report = RunWitnessSearch(family, gamma, Solver(o));
  if (o.format == "json") {
    Write(o, report);
  } else {
    const Json doc = Json::parse(report);
    std::ostringstream out;
    out << "gamma,best_ratio,evaluated,failed,perverse\n"
        << FormatNumber(gamma) << ','
        << (doc["record"].is_null()
                ? std::string("nan")
                : FormatNumber(doc["record"]["ratio"].get<double>()))
        << ',' << doc["trace"]["evaluated"].get<int>() << ','
        << doc["trace"]["failed"].get<int>() << ','
        << doc["trace"]["perverse"].get<int>() << "\n";
    Write(o, out.str());
  }
  return kExitOk;
}

int RunVerify(const Options& o) {
  const Instance instance = Load(o);
  std::ifstream in(o.flow, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + o.flow);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, o.flow + ": malformed JSON");
  }
  if (!doc.is_object() || !doc.contains("class_flows")) {
    throw Error(ErrorCode::kParseError, o.flow + ": missing class_flows");
  }
  ClassPathFlows flows;
  try {
    flows = doc["class_flows"].get<ClassPathFlows>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::kParseError,
                o.flow + ": class_flows must be nested arrays of numbers");
  }
  double gamma = Gamma(o, instance);
  if (!o.gamma && doc.contains("gamma") && doc["gamma"].is_number()) {
    gamma = doc["gamma"].get<double>();
  }
  double eps = 1e-6;
  if (o.eps) {
    eps = *o.eps;
  } else if (doc.contains("wardrop_epsilon") &&
             doc["wardrop_epsilon"].is_number()) {
    eps = doc["wardrop_epsilon"].get<double>();
  }

  const PerceivedCostContext context = PerceivedCostContext::Create(
      instance.problem, instance.profile, {gamma}, Mode(o));
  const FlowAssignment flow(context.problem(), std::move(flows));
  CheckFeasible(context.problem(), context.profile(), flow);
  const DeviationReport report = VerifyNash(context, flow, eps);

  std::ostringstream out;
  if (o.format == "json") {
    Json violations = Json::array();
    for (const Deviation& d : report.violations) {
      violations.push_back({{"commodity", d.commodity},
                            {"class", d.cls},
                            {"path", d.path},
                            {"flow", d.flow},
                            {"cost", d.cost},
                            {"min_cost", d.min_cost}});
    }
    out << Json{{"ok", report.ok()},
                {"epsilon", eps},
                {"max_excess", report.max_excess()},
                {"violations", violations}}
               .dump(2)
        << "\n";
  } else {
    out << "commodity,class,path,flow,cost,min_cost,excess\n";
    for (const Deviation& d : report.violations) {
      out << d.commodity << ',' << d.cls << ',' << d.path << ','
          << FormatNumber(d.flow) << ',' << FormatNumber(d.cost) << ','
          << FormatNumber(d.min_cost) << ',' << FormatNumber(d.excess())
          << "\n";
    }
    out << "# " << (report.ok() ? "ok" : "violations") << " epsilon="
        << FormatNumber(eps) << "\n";
  }
  Write(o, out.str());
  return report.ok() ? kExitOk : kExitInput;
}

int RunBuiltin(const Options& o) {
  if (o.list || o.name.empty()) {
    std::ostringstream out;
    for (const std::string& name : BuiltinNames()) out << name << "\n";
    Write(o, out.str());
    return kExitOk;
  }
  Instance instance = BuiltinInstance(o.name);
  instance.gamma = o.gamma;
  Write(o, SerializeInstance(instance));
  return kExitOk;
}

void AddInstanceFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--instance", o.instance, "Instance document (JSON)");
  cmd->add_option("--builtin", o.builtin,
                  "Builtin instance, e.g. pigou or pigou-d:d=3");
  cmd->add_option("--paths-cap", o.paths_cap,
                  "Maximum enumerated paths per commodity")
      ->check(CLI::PositiveNumber);
}

void AddSolverFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol", o.tol, "Relative gap tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "Iteration limit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Random seed");
}

void AddOutputFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Routing equilibria under scaled slowdown signals"};
  app.require_subcommand(1);
  Options o;

  CLI::App* solve = app.add_subcommand("solve", "Nash flow at one gamma");
  AddInstanceFlags(solve, o);
  AddSolverFlags(solve, o);
  AddOutputFlags(solve, o);
  solve->add_option("--gamma", o.gamma, "Signal scale")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--mode", o.mode, "Cost model")
      ->check(CLI::IsMember({"slowdown", "emulated"}));

  CLI::App* optimum = app.add_subcommand("optimum", "Latency-minimizing flow");
  AddInstanceFlags(optimum, o);
  AddSolverFlags(optimum, o);
  AddOutputFlags(optimum, o);

  CLI::App* sweep = app.add_subcommand("sweep", "Ratios over a gamma range");
  AddInstanceFlags(sweep, o);
  AddSolverFlags(sweep, o);
  AddOutputFlags(sweep, o);
  auto* sweep_gamma = sweep->add_option("--gamma", o.gamma, "Single gamma")
                          ->check(CLI::NonNegativeNumber);
  sweep->add_option("--gamma-range", o.gamma_range, "LO:HI:STEP")
      ->excludes(sweep_gamma);
  sweep->add_option("--workers", o.workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* search =
      app.add_subcommand("search", "Search a family for perverse signals");
  AddSolverFlags(search, o);
  AddOutputFlags(search, o);
  search->add_option("--gamma", o.gamma, "Signal scale (default 0.5)")
      ->check(CLI::NonNegativeNumber);
  search->add_option("--family", o.family, "two-link, k-link or braess")
      ->check(CLI::IsMember({"two-link", "k-link", "braess"}));
  search->add_option("--family-config", o.family_config,
                     "Family description (JSON)");
  search->add_option("--budget", o.budget, "Candidates to evaluate")
      ->check(CLI::PositiveNumber);
  search->add_option("--degree", o.degree, "Latency degree")
      ->check(CLI::PositiveNumber);
  search->add_option("--links", o.links, "Links for the k-link family")
      ->check(CLI::Range(2, 64));
  search->add_option("--classes", o.classes, "Sensitivity classes")
      ->check(CLI::Range(1, 8));
  search->add_option("--strategy", o.strategy, "grid or random")
      ->check(CLI::IsMember({"grid", "random"}));
  search->add_option("--workers", o.workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand("verify", "Re-check a saved flow");
  AddInstanceFlags(verify, o);
  AddOutputFlags(verify, o);
  verify->add_option("--flow", o.flow, "Flow document from solve --format json")
      ->required();
  verify->add_option("--gamma", o.gamma, "Signal scale")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--eps", o.eps, "Wardrop tolerance")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--mode", o.mode, "Cost model")
      ->check(CLI::IsMember({"slowdown", "emulated"}));

  CLI::App* builtin = app.add_subcommand("builtin", "Print a builtin instance");
  builtin->add_option("name", o.name, "Builtin name, e.g. k-link-uniform:k=4");
  builtin->add_flag("--list", o.list, "List builtin names");
  builtin->add_option("--gamma", o.gamma, "Embed a gamma in the document")
      ->check(CLI::NonNegativeNumber);
  builtin->add_option("--out", o.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return RunSolve(o);
    if (*optimum) return RunOptimum(o);
    if (*sweep) return RunSweepCommand(o);
    if (*search) return RunSearch(o);
    if (*verify) return RunVerify(o);
    if (*builtin) return RunBuiltin(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kNotConverged ? kExitNotConverged
                                                : kExitInput;
  }
  return kExitInput;
}
