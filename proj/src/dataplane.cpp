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

#include "fhctl/dataplane.hpp"

#include <algorithm>

#include "fhctl/json_io.hpp"

namespace fhctl {
namespace {

bool lookup_order(const FlowRule& a, const FlowRule& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  return a.rule_id < b.rule_id;
}

}  // namespace

Dataplane::Dataplane(Topology topology) : topology_(std::move(topology)) {
  for (const auto& [id, dev] : topology_.devices()) tables_[id];
}

Result<std::uint64_t> Dataplane::install(FlowRule rule, RuleOrigin origin) {
  auto table = tables_.find(rule.device);
  if (table == tables_.end()) return Error{Errc::kUnknownDevice, "no device " + rule.device.to_string()};
  if (auto st = normalize_rule(rule); !st) return st.error();
  rule.origin = origin;
  rule.rule_id = next_rule_id_++;
  auto& rules = table->second;
  rules.insert(std::upper_bound(rules.begin(), rules.end(), rule, lookup_order), rule);
  return rule.rule_id;
}

Result<std::uint64_t> Dataplane::install_flow_standard(FlowRule rule) {
  if (!tables_.count(rule.device)) return Error{Errc::kUnknownDevice, "no device " + rule.device.to_string()};
  if (rule.match.teid && !topology_.profile_of(rule.device).supports_teid_match_standard) {
    return Error{Errc::kUnsupportedMatch, "teid match is not expressible on the standard channel"};
  }
  return install(std::move(rule), RuleOrigin::kStandard);
}

Result<std::uint64_t> Dataplane::install_flow_bypass(FlowRule rule) {
  return install(std::move(rule), RuleOrigin::kBypass);
}

Status Dataplane::remove_flow(const DeviceId& device, std::uint64_t rule_id) {
  auto table = tables_.find(device);
  if (table == tables_.end()) return Error{Errc::kUnknownDevice, "no device " + device.to_string()};
  auto& rules = table->second;
  auto it = std::find_if(rules.begin(), rules.end(), [&](const FlowRule& r) { return r.rule_id == rule_id; });
  if (it == rules.end()) return Error{Errc::kUnknownRule, "no rule " + std::to_string(rule_id)};
  rules.erase(it);
  return ok_status();
}

Status Dataplane::configure_queue(const QueueConfig& cfg) {
  if (!topology_.has_device(cfg.device)) return Error{Errc::kUnknownDevice, "no device " + cfg.device.to_string()};
  if (!topology_.has_port(cfg.port_ref())) {
    return Error{Errc::kUnknownPort, "no port " + std::to_string(cfg.port) + " on " + cfg.device.to_string()};
  }
  const SwitchProfile& profile = topology_.profile_of(cfg.device);
  if (!profile.supports(cfg.queue_type)) {
    return Error{Errc::kBadQueue, std::string("type=") + std::string(to_string(cfg.queue_type)) + " not supported by " +
                                      profile.name + " on " + cfg.device.to_string()};
  }
  if (!(cfg.max_rate_mbps > 0) || cfg.buffer_bytes == 0) {
    return Error{Errc::kBadQueue, "queue needs a positive max rate and buffer"};
  }
  const auto key = queue_key(cfg);
  if (queues_.count(key)) {
    return Error{Errc::kBadQueue, "queue " + std::to_string(cfg.queue_id) + " already configured on " +
                                      cfg.device.to_string() + " port " + std::to_string(cfg.port)};
  }
  queues_.emplace(key, cfg);
  generations_[key] = ++generation_counter_;
  return ok_status();
}

Status Dataplane::remove_queue(const DeviceId& device, std::uint32_t port, std::uint32_t queue_id) {
  const QueueKey key{device, port, queue_id};
  if (!queues_.erase(key)) return Error{Errc::kBadQueue, "no queue " + std::to_string(queue_id) + " on that port"};
  generations_[key] = ++generation_counter_;
  return ok_status();
}

const QueueConfig* Dataplane::find_queue(const DeviceId& device, std::uint32_t port, std::uint32_t queue_id) const {
  auto it = queues_.find(QueueKey{device, port, queue_id});
  return it == queues_.end() ? nullptr : &it->second;
}

std::vector<const QueueConfig*> Dataplane::queues_on(const PortRef& port) const {
  std::vector<const QueueConfig*> out;
  for (auto it = queues_.lower_bound(QueueKey{port.device, port.port, 0});
       it != queues_.end() && std::get<0>(it->first) == port.device && std::get<1>(it->first) == port.port; ++it) {
    out.push_back(&it->second);
  }
  return out;
}

std::uint64_t Dataplane::queue_generation(const QueueKey& key) const {
  auto it = generations_.find(key);
  return it == generations_.end() ? 0 : it->second;
}

MatchResult Dataplane::match_packet(const DeviceId& device, const PacketHeader& packet, std::uint32_t in_port) const {
  auto table = tables_.find(device);
  if (table == tables_.end()) return {};
  for (const auto& rule : table->second) {
    if (rule.match.matches(packet, in_port)) return {&rule};
  }
  return {};
}

std::span<const FlowRule> Dataplane::flow_table(const DeviceId& device) const {
  auto table = tables_.find(device);
  if (table == tables_.end()) return {};
  return table->second;
}

std::size_t Dataplane::rule_count() const {
  std::size_t n = 0;
  for (const auto& [id, rules] : tables_) n += rules.size();
  return n;
}

Json Dataplane::dump() const {
  Json devices = Json::array();
  for (const auto& [id, rules] : tables_) {
    Json table = Json::array();
    std::vector<const FlowRule*> by_id;
    for (const auto& r : rules) by_id.push_back(&r);
    std::sort(by_id.begin(), by_id.end(), [](auto* a, auto* b) { return a->rule_id < b->rule_id; });
    for (const auto* r : by_id) table.push_back(rule_document(*r));
    Json queues = Json::array();
    for (const auto& [key, q] : queues_) {
      if (std::get<0>(key) == id) queues.push_back(queue_document(q));
    }
    devices.push_back(Json{{"id", id.to_string()},
                           {"profile", topology_.device(id)->profile},
                           {"flow_table", table},
                           {"queues", queues}});
  }
  Json down = Json::array();
  const auto& links = topology_.links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!topology_.link_up(i)) down.push_back(Json{{"src", port_document(links[i].src)}, {"dst", port_document(links[i].dst)}});
  }
  return Json{{"devices", devices}, {"links_down", down}};
}

Status Dataplane::restore(const Json& doc, std::uint64_t next_rule_id) {
  std::map<DeviceId, std::vector<FlowRule>> tables;
  for (const auto& [id, dev] : topology_.devices()) tables[id];
  std::map<QueueKey, QueueConfig> queues;
  try {
    for (const auto& d : doc.at("devices")) {
      auto id = DeviceId::parse(d.at("id").get<std::string>());
      if (!id) return id.error();
      if (!tables.count(*id)) return Error{Errc::kUnknownDevice, "snapshot device not in topology: " + id->to_string()};
      for (const auto& r : d.at("flow_table")) {
        auto rule = parse_rule_document(r);
        if (!rule) return rule.error();
        tables[*id].push_back(*rule);
      }
      for (const auto& q : d.at("queues")) {
        auto queue = parse_queue_document(q);
        if (!queue) return queue.error();
        queues.emplace(queue_key(*queue), *queue);
      }
    }
    for (std::size_t i = 0; i < topology_.links().size(); ++i) topology_.set_link_up(i, true);
    for (const auto& l : doc.value("links_down", Json::array())) {
      auto src = parse_port_document(l.at("src"));
      if (!src) return src.error();
      auto idx = topology_.link_from(*src);
      if (!idx) return Error{Errc::kUnknownLink, "snapshot link not in topology"};
      topology_.set_link_up(*idx, false);
    }
  } catch (const Json::exception& e) {
    return Error{Errc::kInvalidArgument, e.what()};
  }
  for (auto& [id, rules] : tables) std::sort(rules.begin(), rules.end(), lookup_order);
  tables_ = std::move(tables);
  queues_ = std::move(queues);
  for (const auto& [key, q] : queues_) generations_[key] = ++generation_counter_;
  next_rule_id_ = next_rule_id;
  return ok_status();
}

}  // namespace fhctl
