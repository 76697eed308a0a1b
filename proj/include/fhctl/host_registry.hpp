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

#include <map>
#include <optional>
#include <vector>

#include "fhctl/model.hpp"
#include "fhctl/topology.hpp"

namespace fhctl {

/// Registered edge hosts, keyed by MAC. MACs are unique across the registry.
class HostRegistry {
 public:
  Status add(const EdgeHost& host, const Topology& topo);
  Status remove(const HostId& id);

  const EdgeHost* find(const HostId& id) const;
  const EdgeHost* find_mac(const MacAddress& mac) const;
  /// Hosts attached at a port, ordered by MAC.
  std::vector<const EdgeHost*> at_port(const PortRef& port) const;

  std::vector<EdgeHost> list() const;
  std::size_t size() const { return hosts_.size(); }

 private:
  std::map<MacAddress, EdgeHost> hosts_;
};

/// Accepts iff the attachment point is an existing edge port of `topo` and the
/// MAC is not registered yet.
Status validate_host(const EdgeHost& host, const Topology& topo, const HostRegistry& registry);

}  // namespace fhctl
