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

#include "slowroute/instance_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>

#include "json.hpp"
#include "slowroute/error.h"

namespace slowroute {

namespace {

using Json = nlohmann::json;

[[noreturn]] void Fail(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::kParseError, where + ": " + msg);
}

void CheckKeys(const Json& object, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!object.is_object()) Fail(where, "expected an object");
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      Fail(where, "unknown field '" + item.key() + "'");
    }
  }
}

const Json& Require(const Json& object, const std::string& key,
                    const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) Fail(where, "missing field '" + key + "'");
  return *it;
}

double GetNumber(const Json& object, const std::string& key,
                 const std::string& where) {
  const Json& value = Require(object, key, where);
  if (!value.is_number()) Fail(where + "." + key, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) Fail(where + "." + key, "number is not finite");
  return x;
}

long long GetInteger(const Json& object, const std::string& key,
                     const std::string& where) {
  const Json& value = Require(object, key, where);
  if (!value.is_number_integer()) Fail(where + "." + key, "expected an integer");
  return value.get<long long>();
}

std::string GetString(const Json& object, const std::string& key,
                      const std::string& where) {
  const Json& value = Require(object, key, where);
  if (!value.is_string()) Fail(where + "." + key, "expected a string");
  return value.get<std::string>();
}

const Json& GetArray(const Json& object, const std::string& key,
                     const std::string& where) {
  const Json& value = Require(object, key, where);
  if (!value.is_array()) Fail(where + "." + key, "expected an array");
  return value;
}

std::string Indexed(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

// Maps a byte offset into 1-based line and column.
std::string Position(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return "line " + std::to_string(line) + ", column " +
         std::to_string(offset - line_start + 1);
}

int NodeRef(const RoutingProblem& problem, const Json& object,
            const std::string& key, const std::string& where,
            std::vector<std::string>& violations) {
  const std::string id = GetString(object, key, where);
  const int index = problem.NodeIndex(id);
  if (index < 0) violations.push_back(where + "." + key + ": unknown node '" + id + "'");
  return index;
}

bool DefaultPaths(const RoutingProblem& problem, const Commodity& commodity,
                  std::vector<Path>* out) {
  try {
    *out = EnumeratePaths(problem.nodes, problem.edges, commodity.source,
                          commodity.sink);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Instance ParseInstance(std::string_view text, const ParseOptions& options) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // The library reports the offset one past the offending byte.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw Error(ErrorCode::kParseError,
                Position(text, at) + ": malformed JSON");
  }

  const std::string root = "document";
  CheckKeys(doc, root,
            {"schema_version", "name", "nodes", "edges", "commodities",
             "gamma"});
  const long long version = GetInteger(doc, "schema_version", root);
  if (version != kSchemaVersion) {
    Fail(root + ".schema_version",
         "unsupported version " + std::to_string(version));
  }

  Instance instance;
  RoutingProblem& problem = instance.problem;
  std::vector<std::string> violations;
  if (doc.contains("name")) problem.name = GetString(doc, "name", root);

  const Json& nodes = GetArray(doc, "nodes", root);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_string()) Fail(Indexed("nodes", i), "expected a string");
    problem.nodes.push_back(nodes[i].get<std::string>());
  }

  const Json& edges = GetArray(doc, "edges", root);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = Indexed("edges", i);
    CheckKeys(edges[i], where, {"tail", "head", "a", "d", "b"});
    Edge edge;
    edge.tail = NodeRef(problem, edges[i], "tail", where, violations);
    edge.head = NodeRef(problem, edges[i], "head", where, violations);
    edge.latency.a = GetNumber(edges[i], "a", where);
    const long long d = GetInteger(edges[i], "d", where);
    if (d < 1 || d > 64) Fail(where + ".d", "degree must be in [1, 64]");
    edge.latency.degree = static_cast<int>(d);
    edge.latency.b = GetNumber(edges[i], "b", where);
    problem.edges.push_back(edge);
  }

  const Json& commodities = GetArray(doc, "commodities", root);
  std::vector<bool> explicit_paths;
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    const std::string where = Indexed("commodities", i);
    const Json& c = commodities[i];
    CheckKeys(c, where, {"source", "sink", "rate", "classes", "paths"});
    Commodity commodity;
    commodity.source = NodeRef(problem, c, "source", where, violations);
    commodity.sink = NodeRef(problem, c, "sink", where, violations);
    commodity.rate = GetNumber(c, "rate", where);

    const Json& classes = GetArray(c, "classes", where);
    std::vector<SensitivityClass> population;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const std::string cw = Indexed(where + ".classes", k);
      CheckKeys(classes[k], cw, {"beta", "mass"});
      population.push_back(
          {GetNumber(classes[k], "beta", cw), GetNumber(classes[k], "mass", cw)});
    }
    instance.profile.classes.push_back(std::move(population));

    const bool has_paths = c.contains("paths");
    explicit_paths.push_back(has_paths);
    if (has_paths) {
      const Json& paths = GetArray(c, "paths", where);
      for (std::size_t p = 0; p < paths.size(); ++p) {
        const std::string pw = Indexed(where + ".paths", p);
        if (!paths[p].is_array()) Fail(pw, "expected an array of edge indices");
        Path path;
        for (std::size_t j = 0; j < paths[p].size(); ++j) {
          const Json& e = paths[p][j];
          if (!e.is_number_integer()) Fail(Indexed(pw, j), "expected an integer");
          const long long index = e.get<long long>();
          if (index < 0 || index >= problem.num_edges()) {
            Fail(Indexed(pw, j), "edge index out of range");
          }
          path.push_back(static_cast<int>(index));
        }
        commodity.paths.push_back(std::move(path));
      }
    }
    problem.commodities.push_back(std::move(commodity));
  }

  if (doc.contains("gamma")) {
    instance.gamma = GetNumber(doc, "gamma", root);
    if (*instance.gamma < 0) violations.push_back("gamma: must be >= 0");
  }

  auto throw_violations = [&] {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      out << (i ? "; " : "") << violations[i];
    }
    throw Error(ErrorCode::kValidationError, out.str());
  };
  if (!violations.empty()) throw_violations();

  for (std::size_t i = 0; i < problem.commodities.size(); ++i) {
    Commodity& commodity = problem.commodities[i];
    if (explicit_paths[i]) continue;
    try {
      commodity.paths = EnumeratePaths(problem.nodes, problem.edges,
                                       commodity.source, commodity.sink,
                                       options.paths_cap);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kPathExplosion) throw;
      violations.push_back(Indexed("commodities", i) + ": " + e.what());
    }
  }
  if (!violations.empty()) throw_violations();

  instance.profile.Canonicalize();
  const ValidationReport network = ValidateProblem(problem);
  const ValidationReport population = ValidateProfile(problem, instance.profile);
  violations = network.violations;
  violations.insert(violations.end(), population.violations.begin(),
                    population.violations.end());
  if (!violations.empty()) throw_violations();
  return instance;
}

std::string SerializeInstance(const Instance& instance) {
  const RoutingProblem& problem = instance.problem;
  auto node = [&](int index) -> Json {
    if (index >= 0 && index < problem.num_nodes()) return problem.nodes[index];
    throw Error(ErrorCode::kInvalidArgument,
                "node index " + std::to_string(index) + " out of range");
  };

  Json doc = Json::object();
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = problem.name;
  doc["nodes"] = problem.nodes;
  Json edges = Json::array();
  for (const Edge& e : problem.edges) {
    edges.push_back({{"tail", node(e.tail)},
                     {"head", node(e.head)},
                     {"a", e.latency.a},
                     {"d", e.latency.degree},
                     {"b", e.latency.b}});
  }
  doc["edges"] = std::move(edges);

  Json commodities = Json::array();
  for (int c = 0; c < problem.num_commodities(); ++c) {
    const Commodity& commodity = problem.commodities[c];
    Json item = {{"source", node(commodity.source)},
                 {"sink", node(commodity.sink)},
                 {"rate", commodity.rate}};
    Json classes = Json::array();
    if (c < instance.profile.num_commodities()) {
      for (const SensitivityClass& k : instance.profile.classes[c]) {
        classes.push_back({{"beta", k.beta}, {"mass", k.mass}});
      }
    }
    item["classes"] = std::move(classes);
    std::vector<Path> automatic;
    if (!DefaultPaths(problem, commodity, &automatic) ||
        automatic != commodity.paths) {
      item["paths"] = commodity.paths;
    }
    commodities.push_back(std::move(item));
  }
  doc["commodities"] = std::move(commodities);
  if (instance.gamma) doc["gamma"] = *instance.gamma;
  return doc.dump(2) + "\n";
}

Instance LoadInstance(const std::filesystem::path& path,
                      const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParseInstance(text.str(), options);
  } catch (const Error& e) {
    // Keep the code, prefix the file name.
    const std::string what = e.what();
    const std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
    const std::string detail =
        what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
    throw Error(e.code(), path.string() + ": " + detail);
  }
}

namespace {

using Params = std::map<std::string, double>;

Params ParseParams(std::string_view text, const std::string& name,
                   const std::set<std::string>& allowed) {
  Params params;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view()
                                           : text.substr(comma + 1);
    const std::size_t eq = item.find('=');
    const std::string key(item.substr(0, eq));
    if (eq == std::string_view::npos || !allowed.count(key)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad parameter '" + std::string(item) + "' for " + name);
    }
    const std::string_view value = item.substr(eq + 1);
    double x = 0.0;
    const auto [end, ec] =
        std::from_chars(value.data(), value.data() + value.size(), x);
    if (ec != std::errc() || end != value.data() + value.size() ||
        !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad value for '" + key + "' in " + name);
    }
    params[key] = x;
  }
  return params;
}

double Param(const Params& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int IntParam(const Params& params, const std::string& key, int fallback,
             int lo, int hi) {
  const double x = Param(params, key, fallback);
  if (x != std::floor(x) || x < lo || x > hi) {
    throw Error(ErrorCode::kInvalidArgument,
                key + " must be an integer in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

Instance Finish(RoutingProblem problem,
                std::vector<SensitivityClass> classes) {
  Instance instance;
  EnumerateAllPaths(problem);
  instance.problem = std::move(problem);
  instance.profile.classes.push_back(std::move(classes));
  instance.profile.Canonicalize();
  const ValidationReport report =
      ValidateProfile(instance.problem, instance.profile);
  if (!report.ok()) {
    throw Error(ErrorCode::kInvalidArgument, report.ToString());
  }
  return instance;
}

RoutingProblem Parallel(std::string name,
                        std::vector<LatencyFunction> latencies) {
  RoutingProblem problem;
  problem.name = std::move(name);
  problem.nodes = {"s", "t"};
  for (const LatencyFunction& l : latencies) problem.edges.push_back({0, 1, l});
  problem.commodities.push_back({0, 1, 1.0, {}});
  return problem;
}

}  // namespace

std::vector<std::string> BuiltinNames() {
  return {"pigou", "pigou-d", "braess", "two-class-two-link", "k-link-uniform"};
}

Instance BuiltinInstance(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const std::string_view rest =
      colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);

  if (name == "pigou") {
    const Params p = ParseParams(rest, name, {"beta"});
    return Finish(Parallel(name, {{1.0, 1, 0.0}, {0.0, 1, 1.0}}),
                  {{Param(p, "beta", 1.0), 1.0}});
  }
  if (name == "pigou-d") {
    const Params p = ParseParams(rest, name, {"d", "beta"});
    const int d = IntParam(p, "d", 2, 1, 64);
    return Finish(Parallel(name, {{1.0, d, 0.0}, {0.0, d, 1.0}}),
                  {{Param(p, "beta", 1.0), 1.0}});
  }
  if (name == "braess") {
    const Params p = ParseParams(rest, name, {"beta"});
    RoutingProblem problem;
    problem.name = name;
    problem.nodes = {"s", "v", "w", "t"};
    problem.edges = {{0, 1, {1.0, 1, 0.0}},
                     {0, 2, {0.0, 1, 1.0}},
                     {1, 2, {0.0, 1, 0.0}},
                     {1, 3, {0.0, 1, 1.0}},
                     {2, 3, {1.0, 1, 0.0}}};
    problem.commodities.push_back({0, 3, 1.0, {}});
    return Finish(std::move(problem), {{Param(p, "beta", 1.0), 1.0}});
  }
  if (name == "two-class-two-link") {
    const Params p = ParseParams(rest, name, {"beta_low", "beta_high"});
    return Finish(Parallel(name, {{1.0, 1, 0.0}, {1.0, 1, 0.5}}),
                  {{Param(p, "beta_low", 0.25), 0.5},
                   {Param(p, "beta_high", 0.75), 0.5}});
  }
  if (name == "k-link-uniform") {
    const Params p = ParseParams(rest, name, {"k", "beta"});
    const int k = IntParam(p, "k", 3, 1, 1024);
    std::vector<LatencyFunction> latencies;
    for (int i = 0; i < k; ++i) {
      latencies.push_back({1.0, 1, static_cast<double>(i) / k});
    }
    return Finish(Parallel(name, std::move(latencies)),
                  {{Param(p, "beta", 1.0), 1.0}});
  }
  throw Error(ErrorCode::kUnknownInstance, "no builtin named '" + name + "'");
}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace slowroute
