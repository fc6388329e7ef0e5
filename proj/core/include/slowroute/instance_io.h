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

#ifndef SLOWROUTE_INSTANCE_IO_H_
#define SLOWROUTE_INSTANCE_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slowroute/network.h"
#include "slowroute/population.h"

namespace slowroute {

inline constexpr int kSchemaVersion = 1;

// One self-describing document: network, population and optionally a signal.
struct Instance {
  RoutingProblem problem;
  SensitivityProfile profile;
  std::optional<double> gamma;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct ParseOptions {
  // Path cap for commodities whose paths are not listed explicitly.
  int paths_cap = kDefaultPathsCap;
};

// Reads a JSON instance document:
//
//   {"schema_version": 1, "name": "...", "nodes": ["s", "t"],
//    "edges": [{"tail": "s", "head": "t", "a": 1, "d": 1, "b": 0}],
//    "commodities": [{"source": "s", "sink": "t", "rate": 1,
//                     "classes": [{"beta": 1, "mass": 1}],
//                     "paths": [[0]]}],
//    "gamma": 0.5}
//
// `paths` and `gamma` are optional. Classes come back sorted by beta.
// Throws kParseError for malformed or unknown content and kValidationError
// when the document is well formed but the instance is not.
Instance ParseInstance(std::string_view text, const ParseOptions& options = {});

// Inverse of ParseInstance. Keys are sorted and numbers are written in their
// shortest round-trip form, so equal instances serialize to equal bytes.
// Paths are written only when they differ from the automatic enumeration.
std::string SerializeInstance(const Instance& instance);

Instance LoadInstance(const std::filesystem::path& path,
                      const ParseOptions& options = {});

// Named instances, optionally parameterized as "name:key=value,key=value".
//   pigou               x and 1, rate 1. Params: beta (default 1).
//   pigou-d             x^d and 1, rate 1. Params: d (default 2), beta.
//   braess              edges s-v, s-w, v-w, v-t, w-t with latencies
//                       x, 1, 0, 1, x, rate 1. Params: beta.
//   two-class-two-link  x and x + 0.5, rate 1, two classes of mass 0.5.
//                       Params: beta_low (0.25), beta_high (0.75).
//   k-link-uniform      k links with latency x + i/k, rate 1.
//                       Params: k (default 3), beta.
// Throws kUnknownInstance for other names and kInvalidArgument for bad
// parameters.
Instance BuiltinInstance(std::string_view name);

std::vector<std::string> BuiltinNames();

// Shortest decimal form that parses back to the same double.
std::string FormatNumber(double value);

}  // namespace slowroute

#endif  // SLOWROUTE_INSTANCE_IO_H_
