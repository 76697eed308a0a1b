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
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "fhctl/ids.hpp"

namespace fhctl {

/// Header fields a switch can look at. `teid` is filled in when the UDP
/// payload parses as a GTP-U G-PDU.
struct PacketHeader {
  MacAddress eth_src;
  MacAddress eth_dst;
  VlanRef vlan;
  Ipv4Address ip_src;
  Ipv4Address ip_dst;
  std::uint8_t ip_proto = 17;
  std::uint16_t udp_src = 0;
  std::uint16_t udp_dst = 0;
  std::optional<std::uint32_t> teid;
  std::shared_ptr<const std::vector<std::uint8_t>> udp_payload;
};

struct FlowMatch {
  std::optional<std::uint32_t> in_port;
  std::optional<MacAddress> eth_src;
  std::optional<MacAddress> eth_dst;
  std::optional<VlanRef> vlan;
  std::optional<Ipv4Address> ip_src;
  std::optional<Ipv4Address> ip_dst;
  std::optional<std::uint8_t> ip_proto;
  std::optional<std::uint16_t> udp_src;
  std::optional<std::uint16_t> udp_dst;
  /// Extended field; only the bypass channel accepts it.
  std::optional<std::uint32_t> teid;

  bool matches(const PacketHeader& packet, std::uint32_t packet_in_port) const;
  bool operator==(const FlowMatch&) const = default;
};

enum class ActionType { kOutput, kSetQueue, kPunt, kDrop };

std::string_view to_string(ActionType type);

struct FlowAction {
  ActionType type = ActionType::kDrop;
  std::uint32_t arg = 0;  // port for OUTPUT, queue id for SET_QUEUE

  static FlowAction output(std::uint32_t port) { return {ActionType::kOutput, port}; }
  static FlowAction set_queue(std::uint32_t queue_id) { return {ActionType::kSetQueue, queue_id}; }
  static FlowAction punt() { return {ActionType::kPunt, 0}; }
  static FlowAction drop() { return {ActionType::kDrop, 0}; }

  bool operator==(const FlowAction&) const = default;
};

enum class RuleOrigin { kStandard, kBypass };

std::string_view to_string(RuleOrigin origin);

struct FlowRule {
  std::uint64_t rule_id = 0;  // assigned on install
  DeviceId device;
  std::uint32_t priority = 0;
  FlowMatch match;
  std::vector<FlowAction> actions;
  RuleOrigin origin = RuleOrigin::kStandard;
  /// Free-form owner tag, e.g. the intent id or `policy:<teid>`.
  std::string cookie;

  bool operator==(const FlowRule&) const = default;
};

/// Checks the action-list shape and normalizes the match (a TEID match
/// implies UDP destination 2152).
Status normalize_rule(FlowRule& rule);

}  // namespace fhctl
