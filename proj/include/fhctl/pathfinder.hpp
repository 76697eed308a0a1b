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
#include <vector>

#include "fhctl/topology.hpp"

namespace fhctl {

/// Simple path: hops[i] goes devices[i] -> devices[i+1].
struct Path {
  std::vector<DeviceId> devices;
  std::vector<std::size_t> hops;  // link indices into Topology::links()

  std::size_t hop_count() const { return hops.size(); }
  bool operator==(const Path&) const = default;
};

/// Bandwidth reserved per directed link, keyed by the link's source port.
class Reservations {
 public:
  double reserved(const PortRef& link_src) const;
  double residual(const Topology& topo, std::size_t link) const;
  void reserve(const PortRef& link_src, double mbps);
  void release(const PortRef& link_src, double mbps);

  const std::map<PortRef, double>& entries() const { return reserved_; }
  bool operator==(const Reservations&) const = default;

 private:
  std::map<PortRef, double> reserved_;
};

/// Minimum-hop simple path over up links, ties broken by the lexicographically
/// smallest device sequence (then the smallest source port per hop).
/// Errors: UNKNOWN_DEVICE, NO_PATH.
Result<Path> shortest_path(const Topology& topo, const DeviceId& src, const DeviceId& dst);

/// Same selection restricted to hops whose residual capacity covers
/// `required_mbps`. Errors: NO_PATH when no path exists at all,
/// CAPACITY_EXCEEDED when paths exist but none is feasible.
Result<Path> shortest_path_with_capacity(const Topology& topo, const DeviceId& src, const DeviceId& dst,
                                         double required_mbps, const Reservations& reservations);

/// Every simple path of at most `max_hops` hops (bounded at 12), by DFS.
/// Exhaustive oracle for the two functions above.
std::vector<Path> enumerate_paths(const Topology& topo, const DeviceId& src, const DeviceId& dst,
                                  std::size_t max_hops);

}  // namespace fhctl
