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
#include <string_view>
#include <vector>

#include "fhctl/ids.hpp"

namespace fhctl {

enum class HostRole { kRrh, kBbu };

std::string_view to_string(HostRole role);
Result<HostRole> parse_host_role(std::string_view text);

/// A registered fronthaul endpoint: where it attaches and which side it is.
struct EdgeHost {
  DeviceId device;
  std::uint32_t port = 0;
  MacAddress mac;
  VlanRef vlan;
  std::vector<Ipv4Address> ips;
  HostRole role = HostRole::kRrh;

  HostId id() const { return {mac, vlan}; }
  /// First address; the only one the simulated dataplane uses.
  Ipv4Address primary_ip() const { return ips.empty() ? Ipv4Address{} : ips.front(); }

  bool operator==(const EdgeHost&) const = default;
};

struct PortRef {
  DeviceId device;
  std::uint32_t port = 0;

  auto operator<=>(const PortRef&) const = default;
};

/// Directed link. A physical cable is two of these with endpoints swapped.
struct Link {
  PortRef src;
  PortRef dst;
  double capacity_mbps = 0.0;
  std::uint32_t latency_us = 0;

  bool operator==(const Link&) const = default;
};

enum class IntentState { kPendingAdd, kInstalled, kPendingRemove, kWithdrawn, kFailed };

enum class FailureReason { kBadQueue, kNoPath, kUnknownHost, kCapacityExceeded };

std::string_view to_string(IntentState state);
std::string_view to_string(FailureReason reason);
Result<IntentState> parse_intent_state(std::string_view text);
Result<FailureReason> parse_failure_reason(std::string_view text);

enum class QueueType { kLinuxHtb, kProntoStrict, kProntoWeightedRoundRobin };

std::string_view to_string(QueueType type);
Result<QueueType> parse_queue_type(std::string_view text);

struct QueuePlacement {
  PortRef port;
  std::uint32_t queue_id = 0;
  QueueType type = QueueType::kLinuxHtb;

  bool operator==(const QueuePlacement&) const = default;
};

/// Host-to-host connectivity request plus everything its compilation left in
/// the dataplane, so withdrawal and rollback can undo it exactly.
struct EdgeIntent {
  std::string id;
  HostId one;
  HostId two;
  std::optional<double> bandwidth_mbps;

  IntentState state = IntentState::kPendingAdd;
  std::optional<FailureReason> failure_reason;
  /// Finer cause inside a failure reason, e.g. QUEUE_ID_CONFLICT under BAD_QUEUE.
  std::optional<std::string> failure_detail;
  /// Switch that rejected the request, when one did.
  std::optional<DeviceId> failure_device;

  std::optional<std::uint32_t> queue_id;
  std::optional<std::vector<DeviceId>> path;
  /// Source port of each forward hop of `path`.
  std::vector<PortRef> path_links;
  std::vector<QueuePlacement> queues;
  std::vector<std::pair<DeviceId, std::uint64_t>> rules;
  /// Directed links carrying a bandwidth reservation for this intent.
  std::vector<PortRef> reserved_links;

  bool operator==(const EdgeIntent&) const = default;
};

}  // namespace fhctl
