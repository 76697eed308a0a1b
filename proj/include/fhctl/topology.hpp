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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fhctl/model.hpp"
#include "json.hpp"

namespace fhctl {

/// What a switch model accepts. Queue-type support is the only capability
/// difference the dataplane models.
struct SwitchProfile {
  std::string name;
  std::set<QueueType> supported_queue_types;
  bool supports_teid_match_standard = false;

  bool supports(QueueType type) const { return supported_queue_types.count(type) != 0; }
};

/// "ovs-generic" and "pica8-p3297".
const std::vector<SwitchProfile>& shipped_profiles();

struct Device {
  DeviceId id;
  std::string profile;
  std::uint32_t ports = 0;  // ports are numbered 1..ports
  double port_capacity_mbps = 1000.0;  // rate of host-facing ports
};

/// Devices, ports and directed links. The structure is immutable after
/// loading; only per-link up/down state changes.
class Topology {
 public:
  Topology() = default;

  const std::map<DeviceId, Device>& devices() const { return devices_; }
  const std::vector<Link>& links() const { return links_; }
  const std::map<std::string, SwitchProfile>& profiles() const { return profiles_; }

  bool has_device(const DeviceId& id) const { return devices_.count(id) != 0; }
  bool has_port(const PortRef& ref) const;
  const Device* device(const DeviceId& id) const;
  const SwitchProfile& profile_of(const DeviceId& id) const;

  /// Directed link leaving `src`, if the port is an inter-switch port.
  std::optional<std::size_t> link_from(const PortRef& src) const;
  const Link& link(std::size_t index) const { return links_[index]; }
  /// Index of the reverse direction of `index`.
  std::size_t reverse_of(std::size_t index) const { return reverse_[index]; }
  /// Outgoing link indices, ordered by (dst device, src port).
  const std::vector<std::size_t>& out_links(const DeviceId& id) const;

  bool link_up(std::size_t index) const { return up_[index]; }
  /// Sets both directions of the physical link.
  void set_link_up(std::size_t index, bool up);

  /// Rate at which `port` transmits: link capacity, or the device's host-port
  /// capacity for edge ports.
  double port_rate_mbps(const PortRef& port) const;

  // Construction.
  Status add_profile(SwitchProfile profile);
  Status add_device(Device device);
  Status add_link(PortRef a, PortRef b, double capacity_mbps, std::uint32_t latency_us);

 private:
  std::map<std::string, SwitchProfile> profiles_;
  std::map<DeviceId, Device> devices_;
  std::vector<Link> links_;
  std::vector<std::size_t> reverse_;
  std::vector<bool> up_;
  std::map<PortRef, std::size_t> by_src_;
  std::map<DeviceId, std::vector<std::size_t>> out_;
};

/// Builds the topology part of a scenario document (`scenario_version: 1`).
Result<Topology> load_topology(const nlohmann::json& scenario);

}  // namespace fhctl
