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

#pragma once

// Scripted runs: an embedded controller plus the simulator, driven by a
// timeline of actions and checked against assertions kept in the script.

#include <optional>
#include <string>
#include <vector>

#include "fhctl/config.hpp"
#include "fhctl/simulator.hpp"
#include "json.hpp"

namespace fhctl {

inline constexpr int kScriptVersion = 1;

struct ScriptStep {
  double at_s = 0.0;
  /// Assertions only: evaluated after the run instead of at `at_s`.
  bool at_end = false;
  std::string kind;
  nlohmann::json args;
  /// Position in the script, for messages.
  std::size_t index = 0;
};

struct Script {
  std::string name;
  /// Merged over the base controller config.
  nlohmann::json config = nlohmann::json::object();
  double until_s = 10.0;
  double bin_width_s = 0.5;
  std::uint64_t seed = 1;
  std::vector<ScriptStep> actions;
  std::vector<ScriptStep> assertions;
};

/// Errors: INVALID_SCENARIO (version, unknown action or assertion kind,
/// negative times).
Result<Script> parse_script(const nlohmann::json& doc);

struct AssertionOutcome {
  std::size_t index = 0;
  std::string kind;
  std::string label;
  bool passed = false;
  std::string detail;
};

struct ScenarioOutcome {
  std::string script;
  SimReport report;
  std::vector<AssertionOutcome> assertions;
  /// Controller state after the run.
  nlohmann::json final_state;

  bool passed() const;
  int exit_code() const { return passed() ? 0 : 1; }
  nlohmann::json to_json() const;
  std::string table() const;
};

struct RunOverrides {
  std::optional<double> until_s;
  std::optional<std::uint64_t> seed;
};

/// Errors are validation failures; assertion failures are in the outcome.
Result<ScenarioOutcome> run_script(const nlohmann::json& scenario, const Script& script,
                                   const ControllerConfig& base_config, const RunOverrides& overrides = {});

/// File-based entry point. A relative `scenario` path inside the script's
/// config does not apply; the scenario file given here is authoritative.
Result<ScenarioOutcome> run_script_files(const std::string& scenario_path, const std::string& script_path,
                                         const RunOverrides& overrides = {});

}  // namespace fhctl
