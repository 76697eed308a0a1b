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

// JSON forms of the domain types. These are the wire and file formats: REST
// bodies, state dumps and persistence snapshots all go through here.

#include "fhctl/dataplane.hpp"
#include "fhctl/gtpu.hpp"
#include "fhctl/model.hpp"
#include "json.hpp"

namespace fhctl {

using Json = nlohmann::json;

/// Lenient parse of an `ADD host` body: `port` and `vlan` may be strings or
/// integers, vlan `-1` and `None` both mean untagged.
Result<EdgeHost> parse_host_document(const Json& body);
/// Canonical host document (port as string, vlan as `None` or decimal).
Json host_document(const EdgeHost& host);

Json intent_document(const EdgeIntent& intent);
Result<EdgeIntent> parse_intent_snapshot(const Json& doc);

/// Body of `ADD intent`: `one`, `two`, optional `bandwidth` (number or
/// decimal string, positive).
struct IntentRequest {
  HostId one;
  HostId two;
  std::optional<double> bandwidth_mbps;
};
Result<IntentRequest> parse_intent_request(const Json& body);

/// Body of a session registration: `user`, optional `teid` (absent means
/// auto-assign, 0 is rejected), `services`, `rrh`, `bbu`.
Result<gtpu::UserSession> parse_session_request(const Json& body);

Json session_document(const gtpu::UserSession& session);
Result<gtpu::UserSession> parse_session_snapshot(const Json& doc);

Json rule_document(const FlowRule& rule);
Result<FlowRule> parse_rule_document(const Json& doc);

Json queue_document(const QueueConfig& queue);
Result<QueueConfig> parse_queue_document(const Json& doc);

Json port_document(const PortRef& port);
Result<PortRef> parse_port_document(const Json& doc);

/// Reason/detail/device triple of a failed compilation, as it appears in
/// REST error bodies.
Json failure_document(const EdgeIntent& intent);

}  // namespace fhctl
