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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fhctl/dataplane.hpp"
#include "fhctl/host_registry.hpp"
#include "fhctl/pathfinder.hpp"
#include "fhctl/qos.hpp"
#include "json.hpp"

namespace fhctl {

/// Priority of intent forwarding rules. Per-user policy rules sit above it.
inline constexpr std::uint32_t kIntentPriority = 100;

struct RecompileReport {
  std::vector<std::string> rerouted;
  std::vector<std::string> failed;

  std::size_t recompiled() const { return rerouted.size() + failed.size(); }
};

/// Compiles host-to-host intents into queues and flow rules and keeps their
/// lifecycle. Compilation is all-or-nothing: a failed compile removes every
/// rule, queue and reservation it created before returning.
///
/// Placement: for a bandwidth-B intent one->two, one queue (rate B) goes on
/// the first path device's port toward the path and one on the last path
/// device's port toward `two`, both with the same queue id. Forward rules set
/// that queue at those two devices; reverse rules are unshaped. Every path
/// hop reserves B in both directions.
class IntentEngine {
 public:
  /// Called after every state or placement change, with the state before it.
  using Listener = std::function<void(const EdgeIntent& intent, IntentState previous)>;

  IntentEngine(Dataplane& dataplane, const HostRegistry& hosts, const QosNegotiator& qos);

  void set_listener(Listener listener) { listener_ = std::move(listener); }
  void set_queue_buffer_bytes(std::uint64_t bytes) { queue_buffer_bytes_ = bytes; }

  /// Records the intent and compiles it immediately. Only malformed requests
  /// (one == two, bandwidth <= 0) are errors; compile failures leave the
  /// intent in PENDING_ADD with a failure reason.
  Result<std::string> submit_intent(const HostId& one, const HostId& two, std::optional<double> bandwidth_mbps);
  /// Errors: UNKNOWN_INTENT.
  Status withdraw_intent(const std::string& id);
  /// Recompiles a PENDING_ADD intent that carries a failure reason.
  /// Errors: UNKNOWN_INTENT, INVALID_STATE.
  Result<std::string> retry_intent(const std::string& id);
  /// Takes the physical link down (both directions) and recompiles every
  /// installed intent routed over it. Errors: UNKNOWN_LINK.
  Result<RecompileReport> on_link_down(std::size_t link_index);

  const EdgeIntent* find(const std::string& id) const;
  /// In submission order.
  std::vector<const EdgeIntent*> list() const;
  const Reservations& reservations() const { return reservations_; }

  /// True while any intent that is not withdrawn names the host.
  bool references_host(const HostId& host) const;
  /// True if an INSTALLED intent connects the two hosts, in either direction.
  bool connected(const HostId& a, const HostId& b) const;

  nlohmann::json snapshot() const;
  Status restore(const nlohmann::json& doc);

 private:
  void compile(EdgeIntent& intent);
  void teardown(EdgeIntent& intent);
  void set_state(EdgeIntent& intent, IntentState state);
  void notify(const EdgeIntent& intent, IntentState previous);
  EdgeIntent* find_mutable(const std::string& id);

  Dataplane& dataplane_;
  const HostRegistry& hosts_;
  const QosNegotiator& qos_;
  Listener listener_;
  std::uint64_t queue_buffer_bytes_ = kDefaultQueueBufferBytes;

  std::map<std::uint64_t, EdgeIntent> intents_;
  std::map<std::string, std::uint64_t> by_id_;
  std::uint64_t next_key_ = 1;
  Reservations reservations_;
};

}  // namespace fhctl
