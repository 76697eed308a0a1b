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

#include "fhctl/flow.hpp"

#include "fhctl/gtpu.hpp"

namespace fhctl {

bool FlowMatch::matches(const PacketHeader& p, std::uint32_t packet_in_port) const {
  if (in_port && *in_port != packet_in_port) return false;
  if (eth_src && *eth_src != p.eth_src) return false;
  if (eth_dst && *eth_dst != p.eth_dst) return false;
  if (vlan && *vlan != p.vlan) return false;
  if (ip_src && *ip_src != p.ip_src) return false;
  if (ip_dst && *ip_dst != p.ip_dst) return false;
  if (ip_proto && *ip_proto != p.ip_proto) return false;
  if (udp_src && *udp_src != p.udp_src) return false;
  if (udp_dst && *udp_dst != p.udp_dst) return false;
  if (teid && (!p.teid || *teid != *p.teid)) return false;
  return true;
}

std::string_view to_string(ActionType type) {
  switch (type) {
    case ActionType::kOutput: return "OUTPUT";
    case ActionType::kSetQueue: return "SET_QUEUE";
    case ActionType::kPunt: return "PUNT";
    case ActionType::kDrop: return "DROP";
  }
  return "?";
}

std::string_view to_string(RuleOrigin origin) { return origin == RuleOrigin::kBypass ? "BYPASS" : "STANDARD"; }

Status normalize_rule(FlowRule& rule) {
  int outputs = 0;
  int queues = 0;
  bool drop = false;
  for (const auto& a : rule.actions) {
    switch (a.type) {
      case ActionType::kOutput: ++outputs; break;
      case ActionType::kSetQueue: ++queues; break;
      case ActionType::kDrop: drop = true; break;
      case ActionType::kPunt: break;
    }
  }
  if (outputs > 1) return Error{Errc::kInvalidRule, "more than one OUTPUT action"};
  if (queues > 1) return Error{Errc::kInvalidRule, "more than one SET_QUEUE action"};
  if (drop && outputs) return Error{Errc::kInvalidRule, "DROP cannot be combined with OUTPUT"};
  if (rule.match.teid) {
    if (rule.match.udp_dst && *rule.match.udp_dst != gtpu::kUdpPort) {
      return Error{Errc::kInvalidRule, "teid match requires udp_dst 2152"};
    }
    rule.match.udp_dst = gtpu::kUdpPort;
  }
  return ok_status();
}

}  // namespace fhctl
