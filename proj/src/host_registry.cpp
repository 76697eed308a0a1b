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

#include "fhctl/host_registry.hpp"

namespace fhctl {

Status validate_host(const EdgeHost& host, const Topology& topo, const HostRegistry& registry) {
  const PortRef attachment{host.device, host.port};
  if (!topo.has_port(attachment)) {
    return Error{Errc::kUnknownAttachment,
                 "no port " + std::to_string(host.port) + " on device " + host.device.to_string()};
  }
  if (topo.link_from(attachment)) {
    return Error{Errc::kUnknownAttachment, "port " + std::to_string(host.port) + " on " + host.device.to_string() +
                                               " is an inter-switch port"};
  }
  if (host.ips.empty()) return Error{Errc::kInvalidArgument, "host needs at least one IPv4 address"};
  if (registry.find_mac(host.mac)) {
    return Error{Errc::kDuplicateMac, "mac " + host.mac.to_string() + " already registered"};
  }
  return ok_status();
}

Status HostRegistry::add(const EdgeHost& host, const Topology& topo) {
  if (auto st = validate_host(host, topo, *this); !st) return st;
  hosts_.emplace(host.mac, host);
  return ok_status();
}

Status HostRegistry::remove(const HostId& id) {
  auto it = hosts_.find(id.mac);
  if (it == hosts_.end() || it->second.vlan != id.vlan) {
    return Error{Errc::kUnknownHost, "no host " + id.to_string()};
  }
  hosts_.erase(it);
  return ok_status();
}

const EdgeHost* HostRegistry::find(const HostId& id) const {
  auto it = hosts_.find(id.mac);
  if (it == hosts_.end() || it->second.vlan != id.vlan) return nullptr;
  return &it->second;
}

const EdgeHost* HostRegistry::find_mac(const MacAddress& mac) const {
  auto it = hosts_.find(mac);
  return it == hosts_.end() ? nullptr : &it->second;
}

std::vector<const EdgeHost*> HostRegistry::at_port(const PortRef& port) const {
  std::vector<const EdgeHost*> out;
  for (const auto& [mac, host] : hosts_) {
    if (host.device == port.device && host.port == port.port) out.push_back(&host);
  }
  return out;
}

std::vector<EdgeHost> HostRegistry::list() const {
  std::vector<EdgeHost> out;
  out.reserve(hosts_.size());
  for (const auto& [mac, host] : hosts_) out.push_back(host);
  return out;
}

}  // namespace fhctl
