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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slowroute/analysis.h"
#include "slowroute/instance_io.h"

namespace slowroute {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> WitnessFixtures() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(SLOWROUTE_FIXTURE_DIR)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("witness-") && name.ends_with(".json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(WitnessFixtures, AllFamiliesArchived) {
  int two_link = 0;
  int braess = 0;
  for (const fs::path& path : WitnessFixtures()) {
    const std::string name = path.filename().string();
    if (name.starts_with("witness-two-link-")) ++two_link;
    if (name.starts_with("witness-braess-")) ++braess;
  }
  EXPECT_EQ(two_link, 3);
  EXPECT_EQ(braess, 5);
}

TEST(WitnessFixtures, ReplayMatchesRecordedRatio) {
  for (const fs::path& path : WitnessFixtures()) {
    SCOPED_TRACE(path.filename().string());
    std::ifstream in(path);
    ASSERT_TRUE(in);
    const nlohmann::json report = nlohmann::json::parse(in);
    const Instance inst = ParseInstance(report.at("instance").dump());
    const double gamma = report.at("gamma").get<double>();
    ASSERT_TRUE(inst.gamma.has_value());
    EXPECT_EQ(*inst.gamma, gamma);
    const double recorded = report.at("record").at("ratio").get<double>();
    const PerversityRecord replay =
        PerversityRatio(inst.problem, inst.profile, gamma);
    EXPECT_NEAR(replay.ratio, recorded, 1e-9 * std::max(1.0, recorded));
    EXPECT_GE(replay.ratio, 1.001);
    EXPECT_TRUE(replay.with_signal.converged);
    EXPECT_TRUE(replay.without_signal.converged);
  }
}

}  // namespace
}  // namespace slowroute
