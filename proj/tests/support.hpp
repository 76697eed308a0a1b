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

// Fixtures shared by the test binaries.

#include <string>

#include "fhctl/config.hpp"
#include "fhctl/controller.hpp"
#include "fhctl/scenario.hpp"
#include "json.hpp"

namespace fhctl::test {

inline std::string source_path(const std::string& relative) { return std::string(FHCTL_SOURCE_DIR) + "/" + relative; }

inline nlohmann::json load_json(const std::string& relative) {
  auto doc = read_json_file(source_path(relative));
  if (!doc) throw std::runtime_error(doc.error().to_string());
  return *doc;
}

inline nlohmann::json reference_scenario() { return load_json("scenarios/reference.json"); }
inline nlohmann::json pica8_scenario() { return load_json("scenarios/reference-pica8.json"); }

inline DeviceId dev(std::uint64_t n) { return DeviceId::from_dpid(n); }

inline HostId host_id(const std::string& text) { return *HostId::parse(text); }

inline const HostId& rrh() {
  static const HostId id = host_id("00:00:00:00:01:01/None");
  return id;
}
inline const HostId& bbu() {
  static const HostId id = host_id("00:00:00:00:02:01/None");
  return id;
}
inline const HostId& portal() {
  static const HostId id = host_id("00:00:00:00:03:01/None");
  return id;
}

inline std::unique_ptr<Controller> make_controller(const nlohmann::json& scenario, ControllerConfig config = {}) {
  auto ctl = Controller::create(std::move(config), scenario);
  if (!ctl) throw std::runtime_error(ctl.error().to_string());
  return std::move(*ctl);
}

inline Result<ScenarioOutcome> run_bundled(const std::string& scenario, const std::string& script,
                                           const RunOverrides& overrides = {}) {
  return run_script_files(source_path("scenarios/" + scenario + ".json"),
                          source_path("scenarios/scripts/" + script + ".json"), overrides);
}

// The two listings used as wire-format fixtures, byte for byte.
inline constexpr const char* kListing1 = "{\n"
                                         "  \"device\":\"of:0000000000000001\",\n"
                                         "  \"port\":\"1\",\n"
                                         "  \"mac\":\"00:30:18:c9:ef:cd\",\n"
                                         "  \"vlan\":\"-1\",\n"
                                         "  \"ips\":[\"172.16.1.1\"],\n"
                                         "  \"type\":\"RRH\"\n"
                                         "}";
inline constexpr const char* kListing2 = "{\n"
                                         "\t\"one\":\"00:00:00:00:01:01/None\",\n"
                                         "\t\"two\":\"00:00:00:00:02:01/None\",\n"
                                         "\t\"bandwidth\":100\n"
                                         "}";

}  // namespace fhctl::test
