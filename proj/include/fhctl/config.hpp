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

#include <cstdint>
#include <optional>
#include <string>

#include "fhctl/diversion.hpp"
#include "fhctl/qos.hpp"
#include "json.hpp"

namespace fhctl {

struct ControllerConfig {
  std::string username = "onos";
  std::string password = "rocks";
  std::optional<std::string> scenario_path;
  NegotiationTable negotiation;
  bool strict_negotiation = false;
  ServiceCatalog catalog;
  std::optional<HostId> default_portal;
  /// Accept hire requests without credentials (the portal's origin).
  bool portal_unauthenticated = false;
  std::string listen_host = "127.0.0.1";
  int listen_port = 8181;
  std::optional<std::string> persistence_path;
  std::uint64_t queue_buffer_bytes = kDefaultQueueBufferBytes;
};

/// Missing fields keep their defaults; present fields are type-checked.
Result<ControllerConfig> parse_config(const nlohmann::json& doc);
/// Applies the fields present in `overrides` on top of `base`.
Result<ControllerConfig> merge_config(const ControllerConfig& base, const nlohmann::json& overrides);
Result<nlohmann::json> read_json_file(const std::string& path);
Result<ControllerConfig> load_config(const std::string& path);

}  // namespace fhctl
