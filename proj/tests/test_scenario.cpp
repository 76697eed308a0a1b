// Copyright 2026 The fhctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "fhctl/scenario.hpp"
#include "support.hpp"

using namespace fhctl;
using namespace fhctl::test;
using nlohmann::json;

namespace {

json minimal_script() {
  return json::parse(R"({
    "script_version": 1, "name": "t", "until": 2,
    "actions": [
      {"at": 0, "action": "submit-intent", "one": "00:00:00:00:01:01/None", "two": "00:00:00:00:02:01/None",
       "bandwidth": 100, "as": "i"},
      {"at": 0, "action": "start-flow",
       "flow": {"id": "f", "src": "00:00:00:00:01:01/None", "dst": "00:00:00:00:02:01/None", "rate": 50, "stop": 2}}
    ],
    "assertions": [
      {"assert": "intent-state", "intent": "i", "state": "INSTALLED"},
      {"assert": "queue-count", "device": "of:0000000000000004", "count": 1},
      {"assert": "achieved-rate", "flow": "f", "min": 49, "max": 51},
      {"assert": "conservation"}
    ]})");
}

Result<ScenarioOutcome> run(const json& script) {
  auto parsed = parse_script(script);
  if (!parsed) return parsed.error();
  return run_script(reference_scenario(), *parsed, ControllerConfig{});
}

}  // namespace

TEST(ScriptParse, RejectsMalformedScripts) {
  auto bad_version = minimal_script();
  bad_version["script_version"] = 2;
  auto unknown_action = minimal_script();
  unknown_action["actions"][0]["action"] = "launch-rocket";
  auto unknown_assert = minimal_script();
  unknown_assert["assertions"][0]["assert"] = "vibes";
  auto negative = minimal_script();
  negative["actions"][0]["at"] = -1;
  for (const json& doc : {bad_version, unknown_action, unknown_assert, negative, json::array()}) {
    auto r = parse_script(doc);
    ASSERT_FALSE(r) << doc.dump();
    EXPECT_EQ(r.error().code, Errc::kInvalidScenario);
  }
}

TEST(ScriptRun, MinimalScriptPasses) {
  auto outcome = run(minimal_script());
  ASSERT_TRUE(outcome) << outcome.error().to_string();
  EXPECT_TRUE(outcome->passed()) << outcome->table();
  EXPECT_EQ(outcome->exit_code(), 0);
  EXPECT_EQ(outcome->assertions.size(), 4u);
  EXPECT_TRUE(outcome->final_state.contains("dataplane"));
  auto doc = outcome->to_json();
  EXPECT_EQ(doc.at("script"), "t");
}

TEST(ScriptRun, FailingAssertionGivesExitOne) {
  auto script = minimal_script();
  script["assertions"].push_back({{"assert", "achieved-rate"}, {"flow", "f"}, {"min", 90}});
  auto outcome = run(script);
  ASSERT_TRUE(outcome);
  EXPECT_FALSE(outcome->passed());
  EXPECT_EQ(outcome->exit_code(), 1);
  EXPECT_FALSE(outcome->assertions.back().passed);
  EXPECT_FALSE(outcome->assertions.back().detail.empty());
}

TEST(ScriptRun, UnexpectedActionErrorFailsTheRun) {
  auto script = minimal_script();
  script["actions"].push_back({{"at", 1}, {"action", "withdraw-intent"}, {"intent", "0x77"}});
  auto outcome = run(script);
  ASSERT_TRUE(outcome);
  EXPECT_FALSE(outcome->passed());

  script["actions"].back()["expect_error"] = "UNKNOWN_INTENT";
  outcome = run(script);
  ASSERT_TRUE(outcome);
  EXPECT_TRUE(outcome->passed()) << outcome->table();
}

TEST(ScriptRun, AssertionsPastTheHorizonFail) {
  auto script = minimal_script();
  script["assertions"].push_back({{"at", 50}, {"assert", "intent-count"}, {"min", 0}});
  auto outcome = run(script);
  ASSERT_TRUE(outcome);
  EXPECT_FALSE(outcome->assertions.back().passed);
}

TEST(ScriptRun, MissingFilesAreValidationErrors) {
  EXPECT_FALSE(run_script_files("/nonexistent/scenario.json", source_path("scenarios/scripts/reroute.json")));
  EXPECT_FALSE(run_script_files(source_path("scenarios/reference.json"), "/nonexistent/script.json"));
}

TEST(ScriptRun, OverridesAndDeterminism) {
  auto a = run_bundled("reference", "bandwidth-cap", {std::nullopt, 11});
  auto b = run_bundled("reference", "bandwidth-cap", {std::nullopt, 11});
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->to_json().dump(), b->to_json().dump());
  EXPECT_EQ(a->report.seed, 11u);
  auto shorter = run_bundled("reference", "bandwidth-cap", {4.0, std::nullopt});
  ASSERT_TRUE(shorter);
  EXPECT_DOUBLE_EQ(shorter->report.until_s, 4.0);
}

class BundledScript : public ::testing::TestWithParam<std::pair<const char*, const char*>> {};

TEST_P(BundledScript, Passes) {
  auto [scenario, script] = GetParam();
  auto outcome = run_bundled(scenario, script);
  ASSERT_TRUE(outcome) << outcome.error().to_string();
  EXPECT_TRUE(outcome->passed()) << outcome->table();
}

INSTANTIATE_TEST_SUITE_P(Scripts, BundledScript,
                         ::testing::Values(std::pair{"reference", "bandwidth-cap"},
                                           std::pair{"reference", "bandwidth-under-cap"},
                                           std::pair{"reference-pica8", "bad-queue"},
                                           std::pair{"reference", "captive-portal"},
                                           std::pair{"reference", "reroute"}),
                         [](const auto& info) {
                           std::string name = info.param.second;
                           for (char& c : name) c = c == '-' ? '_' : c;
                           return name;
                         });
