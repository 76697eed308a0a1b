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

#include "fhctl/topology.hpp"

#include <algorithm>

namespace fhctl {

using nlohmann::json;

const std::vector<SwitchProfile>& shipped_profiles() {
  static const std::vector<SwitchProfile> profiles = {
      {"ovs-generic", {QueueType::kLinuxHtb}, false},
      {"pica8-p3297", {QueueType::kProntoStrict, QueueType::kProntoWeightedRoundRobin}, false},
  };
  return profiles;
}

bool Topology::has_port(const PortRef& ref) const {
  const Device* d = device(ref.device);
  return d != nullptr && ref.port >= 1 && ref.port <= d->ports;
}

const Device* Topology::device(const DeviceId& id) const {
  auto it = devices_.find(id);
  return it == devices_.end() ? nullptr : &it->second;
}

const SwitchProfile& Topology::profile_of(const DeviceId& id) const {
  return profiles_.at(devices_.at(id).profile);
}

std::optional<std::size_t> Topology::link_from(const PortRef& src) const {
  auto it = by_src_.find(src);
  if (it == by_src_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& Topology::out_links(const DeviceId& id) const {
  static const std::vector<std::size_t> kNone;
  auto it = out_.find(id);
  return it == out_.end() ? kNone : it->second;
}

void Topology::set_link_up(std::size_t index, bool up) {
  up_[index] = up;
  up_[reverse_[index]] = up;
}

double Topology::port_rate_mbps(const PortRef& port) const {
  if (auto l = link_from(port)) return links_[*l].capacity_mbps;
  const Device* d = device(port.device);
  return d ? d->port_capacity_mbps : 0.0;
}

Status Topology::add_profile(SwitchProfile profile) {
  if (profile.name.empty()) return Error{Errc::kInvalidScenario, "profile without a name"};
  if (profile.supported_queue_types.empty()) {
    return Error{Errc::kInvalidScenario, "profile " + profile.name + " supports no queue type"};
  }
  profiles_[profile.name] = std::move(profile);
  return ok_status();
}

Status Topology::add_device(Device device) {
  if (devices_.count(device.id)) return Error{Errc::kInvalidScenario, "duplicate device id " + device.id.to_string()};
  if (!profiles_.count(device.profile)) {
    return Error{Errc::kInvalidScenario, "device " + device.id.to_string() + " uses unknown profile " + device.profile};
  }
  if (device.ports == 0) return Error{Errc::kInvalidScenario, "device " + device.id.to_string() + " has no ports"};
  if (!(device.port_capacity_mbps > 0)) {
    return Error{Errc::kInvalidScenario, "device " + device.id.to_string() + " has non-positive port capacity"};
  }
  devices_.emplace(device.id, std::move(device));
  return ok_status();
}

Status Topology::add_link(PortRef a, PortRef b, double capacity_mbps, std::uint32_t latency_us) {
  for (const PortRef& end : {a, b}) {
    if (!has_port(end)) {
      return Error{Errc::kInvalidScenario,
                   "dangling link endpoint " + end.device.to_string() + " port " + std::to_string(end.port)};
    }
    if (by_src_.count(end)) {
      return Error{Errc::kInvalidScenario,
                   "port already linked: " + end.device.to_string() + " port " + std::to_string(end.port)};
    }
  }
  if (a == b) return Error{Errc::kInvalidScenario, "link connects a port to itself"};
  if (!(capacity_mbps > 0)) return Error{Errc::kInvalidScenario, "link capacity must be positive"};

  const std::size_t fwd = links_.size();
  links_.push_back({a, b, capacity_mbps, latency_us});
  links_.push_back({b, a, capacity_mbps, latency_us});
  reverse_.push_back(fwd + 1);
  reverse_.push_back(fwd);
  up_.push_back(true);
  up_.push_back(true);
  by_src_[a] = fwd;
  by_src_[b] = fwd + 1;
  for (std::size_t idx : {fwd, fwd + 1}) {
    auto& out = out_[links_[idx].src.device];
    out.push_back(idx);
    std::sort(out.begin(), out.end(), [this](std::size_t x, std::size_t y) {
      const Link& lx = links_[x];
      const Link& ly = links_[y];
      return std::tie(lx.dst.device, lx.src.port) < std::tie(ly.dst.device, ly.src.port);
    });
  }
  return ok_status();
}

namespace {

Result<PortRef> parse_endpoint(const json& j) {
  if (!j.is_object() || !j.contains("device") || !j.contains("port")) {
    return Error{Errc::kInvalidScenario, "link endpoint needs device and port"};
  }
  auto dev = DeviceId::parse(j.at("device").get<std::string>());
  if (!dev) return Error{Errc::kInvalidScenario, dev.error().message};
  const auto& port = j.at("port");
  if (!port.is_number_unsigned()) return Error{Errc::kInvalidScenario, "link endpoint port must be a positive integer"};
  return PortRef{*dev, port.get<std::uint32_t>()};
}

}  // namespace

Result<Topology> load_topology(const json& scenario) {
  try {
    if (!scenario.is_object() || scenario.value("scenario_version", 0) != 1) {
      return Error{Errc::kInvalidScenario, "scenario_version must be 1"};
    }
    Topology topo;
    for (const auto& p : shipped_profiles()) (void)topo.add_profile(p);
    for (const auto& p : scenario.value("profiles", json::array())) {
      SwitchProfile profile;
      profile.name = p.at("name").get<std::string>();
      for (const auto& t : p.at("queue_types")) {
        auto qt = parse_queue_type(t.get<std::string>());
        if (!qt) return Error{Errc::kInvalidScenario, qt.error().message};
        profile.supported_queue_types.insert(*qt);
      }
      if (auto st = topo.add_profile(std::move(profile)); !st) return st.error();
    }
    const auto& devices = scenario.at("devices");
    for (const auto& d : devices) {
      auto id = DeviceId::parse(d.at("id").get<std::string>());
      if (!id) return Error{Errc::kInvalidScenario, id.error().message};
      Device dev;
      dev.id = *id;
      dev.profile = d.value("profile", std::string("ovs-generic"));
      dev.ports = d.at("ports").get<std::uint32_t>();
      dev.port_capacity_mbps = d.value("port_capacity", 1000.0);
      if (auto st = topo.add_device(std::move(dev)); !st) return st.error();
    }
    for (const auto& l : scenario.value("links", json::array())) {
      auto a = parse_endpoint(l.at("a"));
      if (!a) return a.error();
      auto b = parse_endpoint(l.at("b"));
      if (!b) return b.error();
      const double capacity = l.at("capacity").get<double>();
      const auto latency = l.value("latency_us", 0u);
      if (auto st = topo.add_link(*a, *b, capacity, latency); !st) return st.error();
    }
    return topo;
  } catch (const json::exception& e) {
    return Error{Errc::kInvalidScenario, e.what()};
  }
}

}  // namespace fhctl
