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

#include "fhctl/json_io.hpp"

#include <charconv>
#include <cmath>

namespace fhctl {
namespace {

Error schema(std::string message) { return Error{Errc::kInvalidArgument, std::move(message)}; }

// Integer carried as a JSON number or a decimal string ("1", "-1").
Result<long> lenient_int(const Json& v, const char* field) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    try {
      std::size_t used = 0;
      long out = std::stol(s, &used);
      if (used == s.size()) return out;
    } catch (const std::exception&) {
    }
  }
  return schema(std::string(field) + " must be an integer or a decimal string");
}

Result<VlanRef> lenient_vlan(const Json& v) {
  if (v.is_string()) return VlanRef::parse(v.get<std::string>());
  if (v.is_number_integer()) return VlanRef::from_int(v.get<long>());
  return Error{Errc::kMalformedVlan, "vlan must be None, -1 or an integer"};
}

template <class T, class F>
Result<T> parse_string_field(const Json& doc, const char* field, F&& parser) {
  if (!doc.contains(field) || !doc.at(field).is_string()) return schema(std::string("missing string field ") + field);
  return parser(doc.at(field).get<std::string>());
}

}  // namespace

Result<EdgeHost> parse_host_document(const Json& body) {
  if (!body.is_object()) return schema("host body must be an object");
  for (const char* field : {"device", "port", "mac", "ips", "type"}) {
    if (!body.contains(field)) return schema(std::string("missing field ") + field);
  }
  EdgeHost host;
  auto device = parse_string_field<DeviceId>(body, "device", DeviceId::parse);
  if (!device) return device.error();
  host.device = *device;

  auto port = lenient_int(body.at("port"), "port");
  if (!port) return port.error();
  if (*port < 1 || *port > 0xFFFFFF) return schema("port must be >= 1");
  host.port = static_cast<std::uint32_t>(*port);

  auto mac = parse_string_field<MacAddress>(body, "mac", MacAddress::parse);
  if (!mac) return mac.error();
  host.mac = *mac;

  if (body.contains("vlan")) {
    auto vlan = lenient_vlan(body.at("vlan"));
    if (!vlan) return vlan.error();
    host.vlan = *vlan;
  }

  const auto& ips = body.at("ips");
  if (!ips.is_array() || ips.empty()) return schema("ips must be a non-empty array");
  for (const auto& ip : ips) {
    if (!ip.is_string()) return schema("ips entries must be strings");
    auto addr = Ipv4Address::parse(ip.get<std::string>());
    if (!addr) return addr.error();
    host.ips.push_back(*addr);
  }

  auto role = parse_string_field<HostRole>(body, "type", parse_host_role);
  if (!role) return role.error();
  host.role = *role;
  return host;
}

Json host_document(const EdgeHost& host) {
  Json ips = Json::array();
  for (const auto& ip : host.ips) ips.push_back(ip.to_string());
  return Json{{"id", host.id().to_string()},       {"device", host.device.to_string()},
              {"port", std::to_string(host.port)}, {"mac", host.mac.to_string()},
              {"vlan", host.vlan.to_string()},      {"ips", ips},
              {"type", std::string(to_string(host.role))}};
}

Json port_document(const PortRef& port) { return Json{{"device", port.device.to_string()}, {"port", port.port}}; }

Result<PortRef> parse_port_document(const Json& doc) {
  if (!doc.is_object() || !doc.contains("port") || !doc.at("port").is_number_unsigned()) {
    return schema("port reference needs device and port");
  }
  auto dev = parse_string_field<DeviceId>(doc, "device", DeviceId::parse);
  if (!dev) return dev.error();
  return PortRef{*dev, doc.at("port").get<std::uint32_t>()};
}

Json failure_document(const EdgeIntent& intent) {
  Json out = Json::object();
  if (intent.failure_reason) out["failure_reason"] = to_string(*intent.failure_reason);
  if (intent.failure_detail) out["failure_detail"] = *intent.failure_detail;
  if (intent.failure_device) out["failure_device"] = intent.failure_device->to_string();
  return out;
}

Json intent_document(const EdgeIntent& intent) {
  Json out{{"id", intent.id},
           {"one", intent.one.to_string()},
           {"two", intent.two.to_string()},
           {"state", std::string(to_string(intent.state))}};
  if (intent.bandwidth_mbps) out["bandwidth"] = *intent.bandwidth_mbps;
  out.update(failure_document(intent));
  if (intent.queue_id) out["queue_id"] = *intent.queue_id;
  if (intent.path) {
    Json path = Json::array();
    for (const auto& d : *intent.path) path.push_back(d.to_string());
    out["path"] = path;
  }
  Json queues = Json::array();
  for (const auto& q : intent.queues) {
    Json qd = port_document(q.port);
    qd["queue_id"] = q.queue_id;
    qd["type"] = to_string(q.type);
    queues.push_back(qd);
  }
  out["queues"] = queues;
  Json rules = Json::array();
  for (const auto& [dev, id] : intent.rules) rules.push_back(Json{{"device", dev.to_string()}, {"rule_id", id}});
  out["rules"] = rules;
  Json hops = Json::array();
  for (const auto& p : intent.path_links) hops.push_back(port_document(p));
  out["path_links"] = hops;
  Json reserved = Json::array();
  for (const auto& p : intent.reserved_links) reserved.push_back(port_document(p));
  out["reserved_links"] = reserved;
  return out;
}

Result<EdgeIntent> parse_intent_snapshot(const Json& doc) {
  try {
    EdgeIntent intent;
    intent.id = doc.at("id").get<std::string>();
    auto one = HostId::parse(doc.at("one").get<std::string>());
    auto two = HostId::parse(doc.at("two").get<std::string>());
    if (!one) return one.error();
    if (!two) return two.error();
    intent.one = *one;
    intent.two = *two;
    auto state = parse_intent_state(doc.at("state").get<std::string>());
    if (!state) return state.error();
    intent.state = *state;
    if (doc.contains("bandwidth")) intent.bandwidth_mbps = doc.at("bandwidth").get<double>();
    if (doc.contains("failure_reason")) {
      auto reason = parse_failure_reason(doc.at("failure_reason").get<std::string>());
      if (!reason) return reason.error();
      intent.failure_reason = *reason;
    }
    if (doc.contains("failure_detail")) intent.failure_detail = doc.at("failure_detail").get<std::string>();
    if (doc.contains("failure_device")) {
      auto dev = DeviceId::parse(doc.at("failure_device").get<std::string>());
      if (!dev) return dev.error();
      intent.failure_device = *dev;
    }
    if (doc.contains("queue_id")) intent.queue_id = doc.at("queue_id").get<std::uint32_t>();
    if (doc.contains("path")) {
      std::vector<DeviceId> path;
      for (const auto& d : doc.at("path")) {
        auto dev = DeviceId::parse(d.get<std::string>());
        if (!dev) return dev.error();
        path.push_back(*dev);
      }
      intent.path = std::move(path);
    }
    for (const auto& q : doc.value("queues", Json::array())) {
      auto port = parse_port_document(q);
      if (!port) return port.error();
      auto type = parse_queue_type(q.at("type").get<std::string>());
      if (!type) return type.error();
      intent.queues.push_back({*port, q.at("queue_id").get<std::uint32_t>(), *type});
    }
    for (const auto& r : doc.value("rules", Json::array())) {
      auto dev = DeviceId::parse(r.at("device").get<std::string>());
      if (!dev) return dev.error();
      intent.rules.emplace_back(*dev, r.at("rule_id").get<std::uint64_t>());
    }
    for (const auto& p : doc.value("path_links", Json::array())) {
      auto port = parse_port_document(p);
      if (!port) return port.error();
      intent.path_links.push_back(*port);
    }
    for (const auto& p : doc.value("reserved_links", Json::array())) {
      auto port = parse_port_document(p);
      if (!port) return port.error();
      intent.reserved_links.push_back(*port);
    }
    return intent;
  } catch (const Json::exception& e) {
    return schema(e.what());
  }
}

Json session_document(const gtpu::UserSession& s) {
  Json out{{"teid", s.teid},
           {"user", s.user_id},
           {"state", std::string(gtpu::to_string(s.state))},
           {"services", s.hired_services}};
  if (s.rrh) out["rrh"] = s.rrh->to_string();
  if (s.bbu) out["bbu"] = s.bbu->to_string();
  if (!s.billing.empty()) out["billing"] = s.billing;
  return out;
}

Result<IntentRequest> parse_intent_request(const Json& body) {
  if (!body.is_object()) return schema("intent body must be an object");
  auto one = parse_string_field<HostId>(body, "one", HostId::parse);
  if (!one) return one.error();
  auto two = parse_string_field<HostId>(body, "two", HostId::parse);
  if (!two) return two.error();
  IntentRequest r{*one, *two, std::nullopt};
  auto it = body.find("bandwidth");
  if (it == body.end() || it->is_null()) return r;
  double bw = 0;
  if (it->is_number()) {
    bw = it->get<double>();
  } else if (it->is_string()) {
    const auto text = it->get<std::string>();
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), bw);
    if (ec != std::errc() || ptr != text.data() + text.size()) return schema("bandwidth must be a number");
  } else {
    return schema("bandwidth must be a number");
  }
  if (!std::isfinite(bw) || bw <= 0) return schema("bandwidth must be positive");
  r.bandwidth_mbps = bw;
  return r;
}

Result<gtpu::UserSession> parse_session_request(const Json& body) {
  if (!body.is_object()) return schema("session body must be an object");
  Json doc = body;
  if (!doc.contains("teid")) {
    doc["teid"] = 0;
  } else if (!doc.at("teid").is_number_integer() || doc.at("teid").get<std::int64_t>() < 1 ||
             doc.at("teid").get<std::int64_t>() > std::int64_t{UINT32_MAX}) {
    return schema("teid must be an integer in 1..4294967295");
  }
  doc.erase("state");
  doc.erase("billing");
  return parse_session_snapshot(doc);
}

Result<gtpu::UserSession> parse_session_snapshot(const Json& doc) {
  try {
    gtpu::UserSession s;
    s.teid = doc.at("teid").get<std::uint32_t>();
    s.user_id = doc.at("user").get<std::string>();
    const auto state = doc.value("state", std::string("ACTIVE"));
    if (state == "ACTIVE") s.state = gtpu::SessionState::kActive;
    else if (state == "DIVERTED") s.state = gtpu::SessionState::kDiverted;
    else if (state == "BLOCKED") s.state = gtpu::SessionState::kBlocked;
    else return schema("unknown session state " + state);
    for (const auto& svc : doc.value("services", Json::array())) s.hired_services.insert(svc.get<std::string>());
    if (doc.contains("billing")) s.billing = doc.at("billing").get<std::map<std::string, std::string>>();
    for (const char* field : {"rrh", "bbu"}) {
      if (!doc.contains(field)) continue;
      auto id = HostId::parse(doc.at(field).get<std::string>());
      if (!id) return id.error();
      (std::string_view(field) == "rrh" ? s.rrh : s.bbu) = *id;
    }
    return s;
  } catch (const Json::exception& e) {
    return schema(e.what());
  }
}

Json rule_document(const FlowRule& rule) {
  Json match = Json::object();
  const FlowMatch& m = rule.match;
  if (m.in_port) match["in_port"] = *m.in_port;
  if (m.eth_src) match["eth_src"] = m.eth_src->to_string();
  if (m.eth_dst) match["eth_dst"] = m.eth_dst->to_string();
  if (m.vlan) match["vlan"] = m.vlan->to_string();
  if (m.ip_src) match["ip_src"] = m.ip_src->to_string();
  if (m.ip_dst) match["ip_dst"] = m.ip_dst->to_string();
  if (m.ip_proto) match["ip_proto"] = *m.ip_proto;
  if (m.udp_src) match["udp_src"] = *m.udp_src;
  if (m.udp_dst) match["udp_dst"] = *m.udp_dst;
  if (m.teid) match["teid"] = *m.teid;
  Json actions = Json::array();
  for (const auto& a : rule.actions) {
    Json ad{{"type", std::string(to_string(a.type))}};
    if (a.type == ActionType::kOutput) ad["port"] = a.arg;
    if (a.type == ActionType::kSetQueue) ad["queue_id"] = a.arg;
    actions.push_back(ad);
  }
  return Json{{"rule_id", rule.rule_id}, {"device", rule.device.to_string()},
              {"priority", rule.priority}, {"match", match},
              {"actions", actions},        {"origin", std::string(to_string(rule.origin))},
              {"cookie", rule.cookie}};
}

Result<FlowRule> parse_rule_document(const Json& doc) {
  try {
    FlowRule rule;
    rule.rule_id = doc.value("rule_id", std::uint64_t{0});
    auto dev = DeviceId::parse(doc.at("device").get<std::string>());
    if (!dev) return dev.error();
    rule.device = *dev;
    rule.priority = doc.value("priority", 0u);
    rule.cookie = doc.value("cookie", std::string());
    rule.origin = doc.value("origin", std::string("STANDARD")) == "BYPASS" ? RuleOrigin::kBypass : RuleOrigin::kStandard;
    const Json match = doc.value("match", Json::object());
    FlowMatch& m = rule.match;
    if (match.contains("in_port")) m.in_port = match.at("in_port").get<std::uint32_t>();
    auto mac_field = [&](const char* f, std::optional<MacAddress>& out) -> Status {
      if (!match.contains(f)) return ok_status();
      auto mac = MacAddress::parse(match.at(f).get<std::string>());
      if (!mac) return mac.error();
      out = *mac;
      return ok_status();
    };
    auto ip_field = [&](const char* f, std::optional<Ipv4Address>& out) -> Status {
      if (!match.contains(f)) return ok_status();
      auto ip = Ipv4Address::parse(match.at(f).get<std::string>());
      if (!ip) return ip.error();
      out = *ip;
      return ok_status();
    };
    for (auto st : {mac_field("eth_src", m.eth_src), mac_field("eth_dst", m.eth_dst), ip_field("ip_src", m.ip_src),
                    ip_field("ip_dst", m.ip_dst)}) {
      if (!st) return st.error();
    }
    if (match.contains("vlan")) {
      auto vlan = lenient_vlan(match.at("vlan"));
      if (!vlan) return vlan.error();
      m.vlan = *vlan;
    }
    if (match.contains("ip_proto")) m.ip_proto = match.at("ip_proto").get<std::uint8_t>();
    if (match.contains("udp_src")) m.udp_src = match.at("udp_src").get<std::uint16_t>();
    if (match.contains("udp_dst")) m.udp_dst = match.at("udp_dst").get<std::uint16_t>();
    if (match.contains("teid")) m.teid = match.at("teid").get<std::uint32_t>();
    for (const auto& a : doc.value("actions", Json::array())) {
      const auto type = a.at("type").get<std::string>();
      if (type == "OUTPUT") rule.actions.push_back(FlowAction::output(a.at("port").get<std::uint32_t>()));
      else if (type == "SET_QUEUE") rule.actions.push_back(FlowAction::set_queue(a.at("queue_id").get<std::uint32_t>()));
      else if (type == "PUNT") rule.actions.push_back(FlowAction::punt());
      else if (type == "DROP") rule.actions.push_back(FlowAction::drop());
      else return schema("unknown action " + type);
    }
    return rule;
  } catch (const Json::exception& e) {
    return schema(e.what());
  }
}

Json queue_document(const QueueConfig& q) {
  return Json{{"device", q.device.to_string()},
              {"port", q.port},
              {"queue_id", q.queue_id},
              {"type", std::string(to_string(q.queue_type))},
              {"max_rate", q.max_rate_mbps},
              {"buffer_bytes", q.buffer_bytes}};
}

Result<QueueConfig> parse_queue_document(const Json& doc) {
  try {
    QueueConfig q;
    auto dev = DeviceId::parse(doc.at("device").get<std::string>());
    if (!dev) return dev.error();
    q.device = *dev;
    q.port = doc.at("port").get<std::uint32_t>();
    q.queue_id = doc.at("queue_id").get<std::uint32_t>();
    auto type = parse_queue_type(doc.at("type").get<std::string>());
    if (!type) return type.error();
    q.queue_type = *type;
    q.max_rate_mbps = doc.at("max_rate").get<double>();
    q.buffer_bytes = doc.value("buffer_bytes", kDefaultQueueBufferBytes);
    return q;
  } catch (const Json::exception& e) {
    return schema(e.what());
  }
}

}  // namespace fhctl
