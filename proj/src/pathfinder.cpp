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

#include "fhctl/pathfinder.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace fhctl {
namespace {

constexpr double kEpsilon = 1e-9;
constexpr std::size_t kMaxEnumeratedHops = 12;

using LinkFilter = std::function<bool(std::size_t)>;

// Reverse BFS from dst gives each device's hop distance to dst; walking
// forward greedily along distance-decreasing links in (dst device, port)
// order then yields the lexicographically smallest minimum-hop path.
std::optional<Path> search(const Topology& topo, const DeviceId& src, const DeviceId& dst, const LinkFilter& usable) {
  std::map<DeviceId, std::vector<std::size_t>> incoming;
  const auto& links = topo.links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (usable(i)) incoming[links[i].dst.device].push_back(i);
  }
  std::map<DeviceId, std::size_t> dist;
  std::deque<DeviceId> frontier{dst};
  dist[dst] = 0;
  while (!frontier.empty()) {
    const DeviceId cur = frontier.front();
    frontier.pop_front();
    for (std::size_t l : incoming[cur]) {
      const DeviceId& prev = links[l].src.device;
      if (!dist.count(prev)) {
        dist[prev] = dist[cur] + 1;
        frontier.push_back(prev);
      }
    }
  }
  if (!dist.count(src)) return std::nullopt;

  Path path;
  path.devices.push_back(src);
  DeviceId cur = src;
  while (cur != dst) {
    const std::size_t want = dist[cur] - 1;
    for (std::size_t l : topo.out_links(cur)) {
      if (!usable(l)) continue;
      auto it = dist.find(links[l].dst.device);
      if (it != dist.end() && it->second == want) {
        path.hops.push_back(l);
        cur = links[l].dst.device;
        path.devices.push_back(cur);
        break;
      }
    }
  }
  return path;
}

Status check_devices(const Topology& topo, const DeviceId& src, const DeviceId& dst) {
  for (const auto& d : {src, dst}) {
    if (!topo.has_device(d)) return Error{Errc::kUnknownDevice, "no device " + d.to_string()};
  }
  return ok_status();
}

}  // namespace

double Reservations::reserved(const PortRef& link_src) const {
  auto it = reserved_.find(link_src);
  return it == reserved_.end() ? 0.0 : it->second;
}

double Reservations::residual(const Topology& topo, std::size_t link) const {
  const Link& l = topo.link(link);
  return l.capacity_mbps - reserved(l.src);
}

void Reservations::reserve(const PortRef& link_src, double mbps) { reserved_[link_src] += mbps; }

void Reservations::release(const PortRef& link_src, double mbps) {
  auto it = reserved_.find(link_src);
  if (it == reserved_.end()) return;
  it->second -= mbps;
  if (it->second <= kEpsilon) reserved_.erase(it);
}

Result<Path> shortest_path(const Topology& topo, const DeviceId& src, const DeviceId& dst) {
  if (auto st = check_devices(topo, src, dst); !st) return st.error();
  auto path = search(topo, src, dst, [&](std::size_t l) { return topo.link_up(l); });
  if (!path) return Error{Errc::kNoPath, "no path from " + src.to_string() + " to " + dst.to_string()};
  return *std::move(path);
}

Result<Path> shortest_path_with_capacity(const Topology& topo, const DeviceId& src, const DeviceId& dst,
                                         double required_mbps, const Reservations& reservations) {
  if (!(required_mbps > 0)) return Error{Errc::kInvalidArgument, "required bandwidth must be positive"};
  auto unconstrained = shortest_path(topo, src, dst);
  if (!unconstrained) return unconstrained.error();
  auto path = search(topo, src, dst, [&](std::size_t l) {
    return topo.link_up(l) && reservations.residual(topo, l) + kEpsilon >= required_mbps;
  });
  if (!path) {
    return Error{Errc::kCapacityExceeded, "no path from " + src.to_string() + " to " + dst.to_string() + " with " +
                                              std::to_string(required_mbps) + " Mbit/s residual"};
  }
  return *std::move(path);
}

std::vector<Path> enumerate_paths(const Topology& topo, const DeviceId& src, const DeviceId& dst,
                                  std::size_t max_hops) {
  std::vector<Path> out;
  if (!topo.has_device(src) || !topo.has_device(dst)) return out;
  max_hops = std::min(max_hops, kMaxEnumeratedHops);
  Path current;
  current.devices.push_back(src);
  std::set<DeviceId> on_path{src};
  std::function<void(const DeviceId&)> dfs = [&](const DeviceId& at) {
    if (at == dst) {
      out.push_back(current);
      return;
    }
    if (current.hops.size() == max_hops) return;
    for (std::size_t l : topo.out_links(at)) {
      if (!topo.link_up(l)) continue;
      const DeviceId& next = topo.link(l).dst.device;
      if (on_path.count(next)) continue;
      on_path.insert(next);
      current.devices.push_back(next);
      current.hops.push_back(l);
      dfs(next);
      current.hops.pop_back();
      current.devices.pop_back();
      on_path.erase(next);
    }
  };
  dfs(src);
  return out;
}

}  // namespace fhctl
