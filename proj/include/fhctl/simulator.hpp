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
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "fhctl/dataplane.hpp"
#include "fhctl/host_registry.hpp"
#include "json.hpp"

namespace fhctl {

inline constexpr std::uint32_t kDefaultPacketSize = 1400;

/// Constant-rate UDP-like generator between two registered hosts.
struct TrafficFlow {
  std::string flow_id;
  HostId src_host;
  HostId dst_host;
  double offered_rate_mbps = 0.0;
  std::uint32_t packet_size = kDefaultPacketSize;
  double start_s = 0.0;
  double stop_s = 0.0;
  /// GTP-U encapsulation with this TEID; plain UDP when empty.
  std::optional<std::uint32_t> gtpu_teid;
};

Result<TrafficFlow> parse_flow_document(const nlohmann::json& doc);
nlohmann::json flow_document(const TrafficFlow& flow);

/// A packet no rule matched, as handed to the controller.
struct PuntEvent {
  double time_s = 0.0;
  DeviceId device;
  std::uint32_t in_port = 0;
  MacAddress eth_src;
  MacAddress eth_dst;
  Ipv4Address ip_src;
  Ipv4Address ip_dst;
  std::optional<std::uint32_t> teid;
  std::string flow_id;
};

struct DropCounters {
  std::uint64_t punt = 0;
  std::uint64_t policy = 0;  // DROP action, or a rule with no output
  std::uint64_t queue = 0;  // tail drop in a port or shaping queue
  std::uint64_t link_down = 0;
  std::uint64_t no_host = 0;
  std::uint64_t queue_removed = 0;
  std::uint64_t loop = 0;

  std::uint64_t total() const { return punt + policy + queue + link_down + no_host + queue_removed + loop; }
};

/// Per-interval counts, binned by send time.
struct FlowBin {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::map<HostId, std::uint64_t> delivered_to;
};

struct FlowReport {
  TrafficFlow flow;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t delivered_bytes = 0;
  double achieved_rate_mbps = 0.0;
  std::map<HostId, std::uint64_t> delivered_to;
  DropCounters drops;
  std::vector<FlowBin> bins;
  std::optional<std::string> error;

  bool conserved() const { return sent == delivered + dropped + in_flight; }
};

struct QueueReport {
  DeviceId device;
  std::uint32_t port = 0;
  std::uint32_t queue_id = 0;
  std::uint64_t enqueued = 0;
  std::uint64_t dequeued = 0;
  std::uint64_t shaped_drops = 0;
};

struct LinkReport {
  PortRef src;
  PortRef dst;
  double capacity_mbps = 0.0;
  std::uint64_t tx_bytes = 0;
  double rate_mbps = 0.0;
};

struct SimReport {
  double until_s = 0.0;
  std::uint64_t seed = 0;
  double bin_width_s = 0.0;
  std::vector<FlowReport> flows;
  std::vector<QueueReport> queues;
  std::vector<LinkReport> links;
  std::uint64_t punts = 0;
  bool conservation_ok = true;

  const FlowReport* flow(const std::string& id) const;

  /// Fraction of packets sent in [from_s, to_s) that reached `host`; with no
  /// host, fraction delivered anywhere. Empty when nothing was sent.
  std::optional<double> delivered_fraction(const std::string& flow_id, double from_s, double to_s,
                                           const std::optional<HostId>& host) const;

  nlohmann::json to_json() const;
  /// Fixed-width summary for terminals.
  std::string table() const;
};

struct SimOptions {
  std::uint64_t seed = 1;
  double bin_width_s = 0.5;
  std::uint64_t port_buffer_bytes = kDefaultQueueBufferBytes;
};

/// Deterministic discrete-event model of the dataplane: one global event
/// queue ordered by (time, sequence). Ports serialize at their link or host
/// port rate; SET_QUEUE steers packets into a token-bucket shaper (rate =
/// max_rate, depth = buffer_bytes, tail drop once the backlog would exceed
/// buffer_bytes). With several queues on one port, PRONTO_STRICT serves
/// them by ascending queue id, the other types by weighted deficit round
/// robin.
/// What the controller does with a punted packet: discard it, or send it
/// back into the switch it came from (after possibly changing the tables).
enum class PuntVerdict { kDrop, kReinject };

class Simulator {
 public:
  using PuntHandler = std::function<PuntVerdict(const PuntEvent&)>;

  Simulator(Dataplane& dataplane, const HostRegistry& hosts, SimOptions options = {});
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Errors: INVALID_ARGUMENT (rate, size, times, duplicate id).
  Status add_flow(const TrafficFlow& flow);
  /// Runs `fn` at simulated time `at_s`, before packets of the same instant
  /// that were scheduled later.
  void schedule(double at_s, std::function<void()> fn);
  void set_punt_handler(PuntHandler handler) { punt_handler_ = std::move(handler); }

  /// Processes every event up to `until_s`. Can be called repeatedly with
  /// increasing horizons.
  SimReport run(double until_s);
  SimReport report() const;

  double now_s() const;
  const std::vector<PuntEvent>& punt_stream() const { return punts_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  PuntHandler punt_handler_;
  std::vector<PuntEvent> punts_;
};

}  // namespace fhctl
