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

#include "slowroute/experiment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "parallel.h"
#include "slowroute/analysis.h"
#include "slowroute/error.h"

namespace slowroute {

namespace {

using Json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double RoundGamma(double x) { return std::round(x * 1e12) / 1e12; }

Json NumberOrNull(double x) {
  return std::isfinite(x) ? Json(x) : Json(nullptr);
}

SweepRow FailedRow(double gamma, std::string error) {
  SweepRow row;
  row.gamma = gamma;
  row.latency_nf = row.latency_opt = row.poa_ratio = row.perversity_ratio =
      row.relative_gap = kNaN;
  row.error = std::move(error);
  return row;
}

}  // namespace

std::vector<double> ParseGammaRange(std::string_view text) {
  auto bad = [&](const std::string& why) -> Error {
    return Error(ErrorCode::kInvalidArgument,
                 "gamma range '" + std::string(text) + "': " + why);
  };
  std::vector<double> parts;
  std::string_view rest = text;
  for (int i = 0; i < 3; ++i) {
    const std::size_t colon = rest.find(':');
    if ((i < 2) == (colon == std::string_view::npos)) {
      throw bad("expected LO:HI:STEP");
    }
    const std::string item(rest.substr(0, colon));
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw bad("'" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(x)) {
      throw bad("'" + item + "' is not a number");
    }
    parts.push_back(x);
    rest = colon == std::string_view::npos ? std::string_view()
                                           : rest.substr(colon + 1);
  }
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0)) throw bad("step must be > 0");
  if (hi < lo) throw bad("hi must be >= lo");
  if (lo < 0) throw bad("gamma must be >= 0");
  const double count = std::floor((hi - lo) / step + 1e-9);
  if (count > 1e6) throw bad("too many points");
  std::vector<double> gammas;
  for (int i = 0; i <= static_cast<int>(count); ++i) {
    gammas.push_back(RoundGamma(lo + i * step));
  }
  return gammas;
}

std::vector<SweepRow> RunSweep(const Instance& instance,
                               std::vector<double> gammas,
                               const SolverConfig& solver, int workers) {
  if (gammas.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one gamma");
  }
  for (double g : gammas) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw Error(ErrorCode::kInvalidArgument, "gamma must be finite and >= 0");
    }
  }
  std::sort(gammas.begin(), gammas.end());

  auto solve = [&](double gamma) {
    return SolveNash(PerceivedCostContext::Create(instance.problem,
                                                  instance.profile, {gamma}),
                     solver);
  };
  const EquilibriumResult baseline = solve(0.0);
  const EquilibriumResult optimum = SolveOptimum(instance.problem, solver);

  std::vector<SweepRow> rows(gammas.size());
  internal::ParallelFor(gammas.size(), workers, [&](std::size_t i) {
    const double gamma = gammas[i];
    try {
      const EquilibriumResult nash = gamma == 0.0 ? baseline : solve(gamma);
      SweepRow& row = rows[i];
      row.gamma = gamma;
      row.latency_nf = nash.total_latency;
      row.latency_opt = optimum.total_latency;
      row.poa_ratio = optimum.total_latency > 0.0
                          ? nash.total_latency / optimum.total_latency
                          : 1.0;
      row.perversity_ratio = baseline.total_latency > 0.0
                                 ? nash.total_latency / baseline.total_latency
                                 : kNaN;
      row.converged =
          nash.converged && baseline.converged && optimum.converged;
      row.relative_gap = nash.relative_gap;
      row.iterations = nash.iterations;
    } catch (const Error& e) {
      rows[i] = FailedRow(gamma, e.what());
    }
  });
  return rows;
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& config) {
  const Instance instance =
      config.builtin ? BuiltinInstance(config.instance)
                     : LoadInstance(config.instance, {config.paths_cap});
  return RunSweep(instance, config.gammas, config.solver, config.workers);
}

std::string FormatSweepCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << "\n";
  for (const SweepRow& r : rows) {
    out << FormatNumber(r.gamma) << ',' << FormatNumber(r.latency_nf) << ','
        << FormatNumber(r.latency_opt) << ',' << FormatNumber(r.poa_ratio)
        << ',' << FormatNumber(r.perversity_ratio) << ','
        << (r.converged ? "true" : "false") << ','
        << FormatNumber(r.relative_gap) << ',' << r.iterations << "\n";
  }
  return out.str();
}

std::string FormatSweepJson(const std::vector<SweepRow>& rows) {
  Json out = Json::array();
  for (const SweepRow& r : rows) {
    Json row = {{"gamma", r.gamma},
                {"L_nf", NumberOrNull(r.latency_nf)},
                {"L_opt", NumberOrNull(r.latency_opt)},
                {"poa_ratio", NumberOrNull(r.poa_ratio)},
                {"perversity_ratio", NumberOrNull(r.perversity_ratio)},
                {"converged", r.converged},
                {"relative_gap", NumberOrNull(r.relative_gap)},
                {"iterations", r.iterations}};
    if (!r.error.empty()) row["error"] = r.error;
    out.push_back(std::move(row));
  }
  return out.dump(2) + "\n";
}

WitnessFamily DefaultFamily(FamilyKind kind) {
  WitnessFamily family;
  family.kind = kind;
  if (kind == FamilyKind::kBraess) family.auxiliary_rate = {0.0, 1.5};
  return family;
}

namespace {

Range ReadRange(const Json& doc, const char* key, Range fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number()) {
    throw Error(ErrorCode::kParseError,
                std::string(key) + ": expected [lo, hi]");
  }
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

template <typename T>
T ReadInteger(const Json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::kParseError,
                std::string(key) + ": expected an integer");
  }
  return it->get<T>();
}

}  // namespace

WitnessFamily ParseFamily(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                "family: malformed JSON near byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, "family: expected an object");
  }
  static const std::set<std::string> kAllowed = {
      "kind",   "degree",    "links",      "a",
      "b",      "rate",      "auxiliary_rate", "class_betas",
      "strategy", "seed",    "budget",     "refine_fraction",
      "workers"};
  for (const auto& item : doc.items()) {
    if (!kAllowed.count(item.key())) {
      throw Error(ErrorCode::kParseError,
                  "family: unknown field '" + item.key() + "'");
    }
  }
  FamilyKind kind = FamilyKind::kTwoLinkParallel;
  if (doc.contains("kind")) {
    const std::optional<FamilyKind> parsed =
        doc["kind"].is_string()
            ? ParseFamilyKind(doc["kind"].get<std::string>())
            : std::nullopt;
    if (!parsed) throw Error(ErrorCode::kParseError, "family: unknown kind");
    kind = *parsed;
  }
  WitnessFamily family = DefaultFamily(kind);
  family.degree = ReadInteger(doc, "degree", family.degree);
  family.links = ReadInteger(doc, "links", family.links);
  family.a = ReadRange(doc, "a", family.a);
  family.b = ReadRange(doc, "b", family.b);
  family.rate = ReadRange(doc, "rate", family.rate);
  family.auxiliary_rate =
      ReadRange(doc, "auxiliary_rate", family.auxiliary_rate);
  if (doc.contains("class_betas")) {
    const Json& betas = doc["class_betas"];
    if (!betas.is_array()) {
      throw Error(ErrorCode::kParseError, "class_betas: expected an array");
    }
    family.class_betas.clear();
    for (const Json& r : betas) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
          !r[1].is_number()) {
        throw Error(ErrorCode::kParseError,
                    "class_betas: expected [lo, hi] pairs");
      }
      family.class_betas.push_back({r[0].get<double>(), r[1].get<double>()});
    }
  }
  if (doc.contains("strategy")) {
    const Json& s = doc["strategy"];
    if (s == "grid") {
      family.strategy = SearchStrategy::kGrid;
    } else if (s == "random") {
      family.strategy = SearchStrategy::kRandom;
    } else {
      throw Error(ErrorCode::kParseError, "strategy: expected grid or random");
    }
  }
  family.seed = ReadInteger(doc, "seed", family.seed);
  family.budget = ReadInteger(doc, "budget", family.budget);
  family.workers = ReadInteger(doc, "workers", family.workers);
  if (doc.contains("refine_fraction")) {
    if (!doc["refine_fraction"].is_number()) {
      throw Error(ErrorCode::kParseError, "refine_fraction: expected a number");
    }
    family.refine_fraction = doc["refine_fraction"].get<double>();
  }
  return family;
}

std::string RunWitnessSearch(const WitnessFamily& family, double gamma,
                             const SolverConfig& solver) {
  const WitnessSearchResult result =
      SearchPerverseWitness(family, gamma, solver);

  auto range = [](Range r) { return Json::array({r.lo, r.hi}); };
  Json betas = Json::array();
  for (Range r : family.class_betas) betas.push_back(range(r));
  Json report = {
      {"gamma", gamma},
      {"family",
       {{"kind", FamilyKindName(family.kind)},
        {"degree", family.degree},
        {"links", family.links},
        {"a", range(family.a)},
        {"b", range(family.b)},
        {"rate", range(family.rate)},
        {"auxiliary_rate", range(family.auxiliary_rate)},
        {"class_betas", std::move(betas)},
        {"strategy",
         family.strategy == SearchStrategy::kGrid ? "grid" : "random"},
        {"seed", family.seed},
        {"budget", family.budget},
        {"refine_fraction", family.refine_fraction}}}};

  Json ratios = Json::array();
  for (double r : result.ratios) ratios.push_back(NumberOrNull(r));
  report["trace"] = {{"evaluated", result.evaluated},
                     {"failed", result.failed},
                     {"perverse", result.perverse},
                     {"best_index", result.best_index},
                     {"ratios", std::move(ratios)}};

  if (result.best) {
    const PerversityRecord& rec = *result.best;
    auto diagnostics = [](const SolveDiagnostics& d) {
      return Json{{"converged", d.converged},
                  {"relative_gap", d.relative_gap},
                  {"iterations", d.iterations},
                  {"total_latency", d.total_latency},
                  {"possibly_non_unique", d.possibly_non_unique}};
    };
    report["record"] = {{"instance_id", rec.instance_id},
                        {"gamma", rec.gamma},
                        {"L_nf_gamma", rec.latency_with_signal},
                        {"L_nf_zero", rec.latency_without_signal},
                        {"ratio", rec.ratio},
                        {"with_signal", diagnostics(rec.with_signal)},
                        {"without_signal", diagnostics(rec.without_signal)}};
    Instance witness{result.witness.problem, result.witness.profile, gamma};
    report["instance"] = Json::parse(SerializeInstance(witness));
  } else {
    report["record"] = nullptr;
    report["instance"] = nullptr;
  }
  return report.dump(2) + "\n";
}

}  // namespace slowroute
