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

#include "fhctl/intents.hpp"

#include <algorithm>
#include <cstdio>

#include "fhctl/json_io.hpp"

namespace fhctl {
namespace {

constexpr double kEpsilon = 1e-9;

std::string format_intent_id(std::uint64_t key) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(key));
  return buf;
}

struct CompileFailure {
  FailureReason reason;
  std::optional<std::string> detail;
  std::optional<DeviceId> device;
};

// Smallest queue id >= 1 not configured on the port.
std::uint32_t smallest_free_queue_id(const Dataplane& dp, const PortRef& port) {
  std::uint32_t id = 1;
  for (const QueueConfig* q : dp.queues_on(port)) {
    if (q->queue_id == id) ++id;
    else if (q->queue_id > id) break;
  }
  return id;
}

FlowRule make_rule(const DeviceId& device, const std::string& cookie, const MacAddress& src, const MacAddress& dst,
                   const VlanRef& vlan) {
  FlowRule rule;
  rule.device = device;
  rule.priority = kIntentPriority;
  rule.cookie = cookie;
  rule.match.eth_src = src;
  rule.match.eth_dst = dst;
  rule.match.vlan = vlan;
  return rule;
}

}  // namespace

IntentEngine::IntentEngine(Dataplane& dataplane, const HostRegistry& hosts, const QosNegotiator& qos)
    : dataplane_(dataplane), hosts_(hosts), qos_(qos) {}

void IntentEngine::notify(const EdgeIntent& intent, IntentState previous) {
  if (listener_) listener_(intent, previous);
}

void IntentEngine::set_state(EdgeIntent& intent, IntentState state) {
  const IntentState previous = intent.state;
  intent.state = state;
  notify(intent, previous);
}

EdgeIntent* IntentEngine::find_mutable(const std::string& id) {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &intents_.at(it->second);
}

const EdgeIntent* IntentEngine::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &intents_.at(it->second);
}

std::vector<const EdgeIntent*> IntentEngine::list() const {
  std::vector<const EdgeIntent*> out;
  for (const auto& [key, intent] : intents_) out.push_back(&intent);
  return out;
}

bool IntentEngine::references_host(const HostId& host) const {
  return std::any_of(intents_.begin(), intents_.end(), [&](const auto& kv) {
    const EdgeIntent& i = kv.second;
    return i.state != IntentState::kWithdrawn && (i.one == host || i.two == host);
  });
}

bool IntentEngine::connected(const HostId& a, const HostId& b) const {
  return std::any_of(intents_.begin(), intents_.end(), [&](const auto& kv) {
    const EdgeIntent& i = kv.second;
    return i.state == IntentState::kInstalled && ((i.one == a && i.two == b) || (i.one == b && i.two == a));
  });
}

void IntentEngine::teardown(EdgeIntent& intent) {
  for (auto it = intent.rules.rbegin(); it != intent.rules.rend(); ++it) {
    (void)dataplane_.remove_flow(it->first, it->second);
  }
  for (auto it = intent.queues.rbegin(); it != intent.queues.rend(); ++it) {
    (void)dataplane_.remove_queue(it->port.device, it->port.port, it->queue_id);
  }
  if (intent.bandwidth_mbps) {
    for (const auto& link : intent.reserved_links) reservations_.release(link, *intent.bandwidth_mbps);
  }
  intent.rules.clear();
  intent.queues.clear();
  intent.reserved_links.clear();
  intent.path_links.clear();
  intent.path.reset();
  intent.queue_id.reset();
}

void IntentEngine::compile(EdgeIntent& intent) {
  intent.failure_reason.reset();
  intent.failure_detail.reset();
  intent.failure_device.reset();

  auto fail = [&](CompileFailure f) {
    teardown(intent);
    intent.failure_reason = f.reason;
    intent.failure_detail = std::move(f.detail);
    intent.failure_device = f.device;
  };

  const EdgeHost* one = hosts_.find(intent.one);
  const EdgeHost* two = hosts_.find(intent.two);
  if (!one || !two) {
    fail({FailureReason::kUnknownHost, (one ? intent.two : intent.one).to_string(), std::nullopt});
    return;
  }

  const Topology& topo = dataplane_.topology();
  auto path = intent.bandwidth_mbps
                  ? shortest_path_with_capacity(topo, one->device, two->device, *intent.bandwidth_mbps, reservations_)
                  : shortest_path(topo, one->device, two->device);
  if (!path) {
    const auto reason =
        path.error().code == Errc::kCapacityExceeded ? FailureReason::kCapacityExceeded : FailureReason::kNoPath;
    fail({reason, std::nullopt, std::nullopt});
    return;
  }
  const auto& devices = path->devices;
  const auto& hops = path->hops;
  const std::size_t n = devices.size();

  // Every reverse hop must fit too; all intents reserve symmetrically, but
  // link capacities need not be.
  if (intent.bandwidth_mbps) {
    for (std::size_t h : hops) {
      if (reservations_.residual(topo, topo.reverse_of(h)) + kEpsilon < *intent.bandwidth_mbps) {
        fail({FailureReason::kCapacityExceeded, std::string("reverse direction"), std::nullopt});
        return;
      }
    }
  }

  // Forward out port per device and, for the reverse direction, the port
  // back toward the previous device.
  auto forward_out = [&](std::size_t i) { return i + 1 < n ? topo.link(hops[i]).src.port : two->port; };
  auto reverse_out = [&](std::size_t i) { return i == 0 ? one->port : topo.link(hops[i - 1]).dst.port; };

  std::optional<std::uint32_t> queue_id;
  if (intent.bandwidth_mbps) {
    const PortRef ingress{devices.front(), forward_out(0)};
    const PortRef egress{devices.back(), two->port};
    const std::uint32_t id = smallest_free_queue_id(dataplane_, ingress);
    if (egress != ingress && dataplane_.find_queue(egress.device, egress.port, id)) {
      fail({FailureReason::kBadQueue, std::string("QUEUE_ID_CONFLICT"), egress.device});
      return;
    }
    std::vector<PortRef> placements{ingress};
    if (egress != ingress) placements.push_back(egress);
    for (const PortRef& at : placements) {
      auto type = qos_.request_type(topo.profile_of(at.device));
      if (!type) {
        fail({FailureReason::kBadQueue, std::string("NO_COMMON_TYPE"), at.device});
        return;
      }
      QueueConfig cfg{at.device, at.port, id, *type, *intent.bandwidth_mbps, queue_buffer_bytes_};
      if (auto st = dataplane_.configure_queue(cfg); !st) {
        fail({FailureReason::kBadQueue, st.error().message, at.device});
        return;
      }
      intent.queues.push_back({at, id, *type});
    }
    queue_id = id;
  }

  for (std::size_t i = 0; i < n; ++i) {
    FlowRule fwd = make_rule(devices[i], intent.id, one->mac, two->mac, one->vlan);
    if (queue_id && (i == 0 || i + 1 == n)) fwd.actions.push_back(FlowAction::set_queue(*queue_id));
    fwd.actions.push_back(FlowAction::output(forward_out(i)));
    FlowRule rev = make_rule(devices[i], intent.id, two->mac, one->mac, two->vlan);
    rev.actions.push_back(FlowAction::output(reverse_out(i)));
    for (FlowRule* rule : {&fwd, &rev}) {
      auto id = dataplane_.install_flow_standard(*rule);
      if (!id) {
        fail({FailureReason::kNoPath, id.error().to_string(), devices[i]});
        return;
      }
      intent.rules.emplace_back(devices[i], *id);
    }
  }

  for (std::size_t h : hops) intent.path_links.push_back(topo.link(h).src);
  if (intent.bandwidth_mbps) {
    for (std::size_t h : hops) {
      for (std::size_t dir : {h, topo.reverse_of(h)}) {
        const PortRef& src = topo.link(dir).src;
        reservations_.reserve(src, *intent.bandwidth_mbps);
        intent.reserved_links.push_back(src);
      }
    }
  }
  intent.path = devices;
  intent.queue_id = queue_id;
}

Result<std::string> IntentEngine::submit_intent(const HostId& one, const HostId& two,
                                                std::optional<double> bandwidth_mbps) {
  if (one == two) return Error{Errc::kInvalidArgument, "intent endpoints must differ"};
  if (bandwidth_mbps && !(*bandwidth_mbps > 0)) return Error{Errc::kInvalidArgument, "bandwidth must be positive"};

  const std::uint64_t key = next_key_++;
  EdgeIntent& intent = intents_[key];
  intent.id = format_intent_id(key);
  intent.one = one;
  intent.two = two;
  intent.bandwidth_mbps = bandwidth_mbps;
  intent.state = IntentState::kPendingAdd;
  by_id_[intent.id] = key;
  notify(intent, IntentState::kPendingAdd);

  compile(intent);
  if (!intent.failure_reason) set_state(intent, IntentState::kInstalled);
  else notify(intent, IntentState::kPendingAdd);
  return intent.id;
}

Status IntentEngine::withdraw_intent(const std::string& id) {
  EdgeIntent* intent = find_mutable(id);
  if (!intent) return Error{Errc::kUnknownIntent, "no intent " + id};
  if (intent->state == IntentState::kInstalled) set_state(*intent, IntentState::kPendingRemove);
  teardown(*intent);
  set_state(*intent, IntentState::kWithdrawn);
  const auto key = by_id_.at(id);
  by_id_.erase(id);
  intents_.erase(key);
  return ok_status();
}

Result<std::string> IntentEngine::retry_intent(const std::string& id) {
  EdgeIntent* intent = find_mutable(id);
  if (!intent) return Error{Errc::kUnknownIntent, "no intent " + id};
  if (intent->state != IntentState::kPendingAdd || !intent->failure_reason) {
    return Error{Errc::kInvalidState, "intent " + id + " is " + std::string(to_string(intent->state))};
  }
  compile(*intent);
  if (!intent->failure_reason) set_state(*intent, IntentState::kInstalled);
  else notify(*intent, IntentState::kPendingAdd);
  return intent->id;
}

Result<RecompileReport> IntentEngine::on_link_down(std::size_t link_index) {
  Topology& topo = dataplane_.topology();
  if (link_index >= topo.links().size()) return Error{Errc::kUnknownLink, "no link " + std::to_string(link_index)};
  topo.set_link_up(link_index, false);
  const PortRef a = topo.link(link_index).src;
  const PortRef b = topo.link(topo.reverse_of(link_index)).src;

  RecompileReport report;
  for (auto& [key, intent] : intents_) {
    if (intent.state != IntentState::kInstalled) continue;
    const bool uses = std::any_of(intent.path_links.begin(), intent.path_links.end(),
                                  [&](const PortRef& p) { return p == a || p == b; });
    if (!uses) continue;
    teardown(intent);
    compile(intent);
    if (!intent.failure_reason) {
      report.rerouted.push_back(intent.id);
      notify(intent, IntentState::kInstalled);
    } else {
      report.failed.push_back(intent.id);
      set_state(intent, IntentState::kPendingAdd);
    }
  }
  return report;
}

nlohmann::json IntentEngine::snapshot() const {
  Json intents = Json::array();
  for (const auto& [key, intent] : intents_) intents.push_back(intent_document(intent));
  Json reservations = Json::array();
  for (const auto& [port, mbps] : reservations_.entries()) {
    Json r = port_document(port);
    r["mbps"] = mbps;
    reservations.push_back(r);
  }
  return Json{{"intents", intents}, {"reservations", reservations}, {"next_key", next_key_}};
}

Status IntentEngine::restore(const nlohmann::json& doc) {
  std::map<std::uint64_t, EdgeIntent> intents;
  std::map<std::string, std::uint64_t> by_id;
  Reservations reservations;
  try {
    for (const auto& d : doc.at("intents")) {
      auto intent = parse_intent_snapshot(d);
      if (!intent) return intent.error();
      const auto key = std::stoull(intent->id.substr(2), nullptr, 16);
      by_id[intent->id] = key;
      intents.emplace(key, *std::move(intent));
    }
    for (const auto& r : doc.at("reservations")) {
      auto port = parse_port_document(r);
      if (!port) return port.error();
      reservations.reserve(*port, r.at("mbps").get<double>());
    }
    next_key_ = doc.at("next_key").get<std::uint64_t>();
  } catch (const std::exception& e) {
    return Error{Errc::kInvalidArgument, e.what()};
  }
  intents_ = std::move(intents);
  by_id_ = std::move(by_id);
  reservations_ = std::move(reservations);
  return ok_status();
}

}  // namespace fhctl
