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
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "fhctl/flow.hpp"
#include "fhctl/topology.hpp"
#include "json.hpp"

namespace fhctl {

inline constexpr std::uint64_t kDefaultQueueBufferBytes = 512 * 1024;

struct QueueConfig {
  DeviceId device;
  std::uint32_t port = 0;
  std::uint32_t queue_id = 0;
  QueueType queue_type = QueueType::kLinuxHtb;
  double max_rate_mbps = 0.0;
  std::uint64_t buffer_bytes = kDefaultQueueBufferBytes;

  PortRef port_ref() const { return {device, port}; }
  bool operator==(const QueueConfig&) const = default;
};

using QueueKey = std::tuple<DeviceId, std::uint32_t, std::uint32_t>;

inline QueueKey queue_key(const QueueConfig& q) { return {q.device, q.port, q.queue_id}; }

/// Result of a flow-table lookup: the winning rule, or a punt to the
/// controller when nothing matches.
struct MatchResult {
  const FlowRule* rule = nullptr;
  bool punt() const { return rule == nullptr; }
};

/// Switch state for every device of a topology: prioritized flow tables and
/// per-port queues. Two install channels exist; the standard one refuses
/// TEID matches.
class Dataplane {
 public:
  explicit Dataplane(Topology topology);

  const Topology& topology() const { return topology_; }
  Topology& topology() { return topology_; }

  /// Errors: UNKNOWN_DEVICE, UNSUPPORTED_MATCH (teid), INVALID_RULE.
  Result<std::uint64_t> install_flow_standard(FlowRule rule);
  /// Accepts any match; records origin BYPASS. Errors: UNKNOWN_DEVICE, INVALID_RULE.
  Result<std::uint64_t> install_flow_bypass(FlowRule rule);
  Status remove_flow(const DeviceId& device, std::uint64_t rule_id);

  /// Errors: UNKNOWN_DEVICE, UNKNOWN_PORT, BAD_QUEUE (type unsupported by the
  /// switch profile, or the queue id is already configured on the port).
  /// A rejected config leaves state untouched.
  Status configure_queue(const QueueConfig& cfg);
  Status remove_queue(const DeviceId& device, std::uint32_t port, std::uint32_t queue_id);
  const QueueConfig* find_queue(const DeviceId& device, std::uint32_t port, std::uint32_t queue_id) const;
  /// Queues on one port, ascending queue id.
  std::vector<const QueueConfig*> queues_on(const PortRef& port) const;
  const std::map<QueueKey, QueueConfig>& queues() const { return queues_; }
  /// Bumped every time the queue set changes; lets the simulator notice
  /// queues that vanished under a backlog.
  std::uint64_t queue_generation(const QueueKey& key) const;

  /// Highest priority wins; equal priorities go to the smallest rule id.
  MatchResult match_packet(const DeviceId& device, const PacketHeader& packet, std::uint32_t in_port) const;

  /// Rules of one device in lookup order.
  std::span<const FlowRule> flow_table(const DeviceId& device) const;
  std::size_t rule_count() const;

  /// Canonical document of flow tables, queues and link state. Two dataplanes
  /// with equal dumps forward identically.
  nlohmann::json dump() const;
  /// Restores tables, queues and link state from `dump()` output, plus the
  /// rule id counter.
  Status restore(const nlohmann::json& doc, std::uint64_t next_rule_id);
  std::uint64_t next_rule_id() const { return next_rule_id_; }

 private:
  Result<std::uint64_t> install(FlowRule rule, RuleOrigin origin);

  Topology topology_;
  std::map<DeviceId, std::vector<FlowRule>> tables_;
  std::map<QueueKey, QueueConfig> queues_;
  std::map<QueueKey, std::uint64_t> generations_;
  std::uint64_t generation_counter_ = 0;
  std::uint64_t next_rule_id_ = 1;
};

}  // namespace fhctl
