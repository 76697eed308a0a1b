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

#include "fhctl/diversion.hpp"

#include <set>

#include "fhctl/json_io.hpp"
#include "fhctl/pathfinder.hpp"

namespace fhctl {
namespace {

struct Step {
  DeviceId device;
  std::optional<std::uint32_t> in_port;
  FlowAction action;
};

// Appends one step per hop of `path`, entering the first device on `in_port`.
// Returns the in_port at the path's last device.
std::optional<std::uint32_t> walk(const Topology& topo, const Path& path, std::optional<std::uint32_t> in_port,
                                  std::vector<Step>& steps) {
  for (std::size_t i = 0; i < path.hops.size(); ++i) {
    const Link& link = topo.link(path.hops[i]);
    steps.push_back({path.devices[i], in_port, FlowAction::output(link.src.port)});
    in_port = link.dst.port;
  }
  return in_port;
}

std::string cookie_for(std::uint32_t teid) { return "policy:" + std::to_string(teid); }

}  // namespace

std::string_view to_string(PolicyAction action) {
  switch (action) {
    case PolicyAction::kAllow: return "ALLOW";
    case PolicyAction::kDivert: return "DIVERT";
    case PolicyAction::kDrop: return "DROP";
  }
  return "?";
}

Result<PolicyAction> parse_policy_action(std::string_view text) {
  if (text == "ALLOW") return PolicyAction::kAllow;
  if (text == "DIVERT") return PolicyAction::kDivert;
  if (text == "DROP") return PolicyAction::kDrop;
  return Error{Errc::kInvalidArgument, "policy action must be ALLOW, DIVERT or DROP"};
}

const CatalogEntry* ServiceCatalog::find(const std::string& name) const {
  for (const CatalogEntry& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Result<ServiceCatalog> parse_catalog(const nlohmann::json& doc) {
  ServiceCatalog catalog;
  try {
    if (!doc.is_array()) return Error{Errc::kInvalidArgument, "catalog must be an array"};
    for (const auto& item : doc) {
      CatalogEntry e;
      e.name = item.at("name").get<std::string>();
      if (e.name.empty()) return Error{Errc::kInvalidArgument, "catalog entry without a name"};
      if (catalog.find(e.name)) return Error{Errc::kInvalidArgument, "duplicate catalog entry " + e.name};
      if (item.contains("bandwidth") && !item.at("bandwidth").is_null()) {
        e.bandwidth_mbps = item.at("bandwidth").get<double>();
        if (!(*e.bandwidth_mbps > 0)) return Error{Errc::kInvalidArgument, "catalog bandwidth must be positive"};
      }
      e.grants_data = item.value("data", true);
      catalog.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    return Error{Errc::kInvalidArgument, std::string("bad catalog: ") + ex.what()};
  }
  return catalog;
}

nlohmann::json catalog_document(const ServiceCatalog& catalog) {
  nlohmann::json out = nlohmann::json::array();
  for (const CatalogEntry& e : catalog.entries) {
    nlohmann::json item{{"name", e.name}, {"data", e.grants_data}};
    if (e.bandwidth_mbps) item["bandwidth"] = *e.bandwidth_mbps;
    out.push_back(std::move(item));
  }
  return out;
}

DiversionEngine::DiversionEngine(Dataplane& dataplane, const HostRegistry& hosts, IntentEngine& intents)
    : dataplane_(dataplane), hosts_(hosts), intents_(intents) {}

Result<std::uint32_t> DiversionEngine::create_session(gtpu::UserSession session) {
  for (const auto& host : {session.rrh, session.bbu}) {
    if (host && hosts_.find(*host) == nullptr) {
      return Error{Errc::kUnknownHost, "host " + host->to_string() + " is not registered"};
    }
  }
  if (session.teid == 0) session.teid = sessions_.next_free_teid();
  session.state = gtpu::SessionState::kActive;
  const std::uint32_t teid = session.teid;
  if (Status st = sessions_.add(std::move(session)); !st.ok()) return st.error();
  return teid;
}

Result<DeviceId> DiversionEngine::bbu_switch(const gtpu::UserSession& session) const {
  if (session.bbu) {
    const EdgeHost* host = hosts_.find(*session.bbu);
    if (host == nullptr) return Error{Errc::kNoBbuSwitch, "session BBU " + session.bbu->to_string() + " is gone"};
    return host->device;
  }
  std::set<DeviceId> devices;
  for (const EdgeHost& h : hosts_.list()) {
    if (h.role != HostRole::kBbu) continue;
    if (default_portal_ && h.id() == *default_portal_) continue;
    devices.insert(h.device);
  }
  if (devices.size() != 1) {
    return Error{Errc::kNoBbuSwitch, devices.empty() ? "no BBU host is registered"
                                                     : "BBU hosts sit on several switches; give the session a bbu"};
  }
  return *devices.begin();
}

bool DiversionEngine::needs_data_service(const gtpu::UserSession& session) const {
  for (const std::string& name : session.hired_services) {
    const CatalogEntry* e = catalog_.find(name);
    if (e != nullptr && e->grants_data) return false;
  }
  return true;
}

Status DiversionEngine::install(DiversionPolicy& policy, const gtpu::UserSession& session) {
  const Topology& topo = dataplane_.topology();
  auto bbu = bbu_switch(session);
  if (!bbu) return bbu.error();

  std::vector<Step> steps;
  std::optional<std::uint32_t> in_port;
  if (session.rrh) {
    const EdgeHost* rrh = hosts_.find(*session.rrh);
    if (rrh == nullptr) return Error{Errc::kUnknownHost, "session RRH " + session.rrh->to_string() + " is gone"};
    auto path = shortest_path(topo, rrh->device, *bbu);
    if (!path) return path.error();
    in_port = walk(topo, *path, rrh->port, steps);
  }
  if (policy.action == PolicyAction::kDrop) {
    steps.push_back({*bbu, in_port, FlowAction::drop()});
  } else {
    const EdgeHost* portal = hosts_.find(*policy.portal);
    auto path = shortest_path(topo, *bbu, portal->device);
    if (!path) return path.error();
    in_port = walk(topo, *path, in_port, steps);
    steps.push_back({portal->device, in_port, FlowAction::output(portal->port)});
  }

  policy.installed_rules.clear();
  for (const Step& step : steps) {
    FlowRule rule;
    rule.device = step.device;
    rule.priority = kPolicyPriority;
    rule.match.teid = policy.teid;
    rule.match.in_port = step.in_port;
    rule.actions = {step.action};
    rule.cookie = cookie_for(policy.teid);
    auto id = dataplane_.install_flow_bypass(std::move(rule));
    if (!id) {
      uninstall(policy);
      return id.error();
    }
    policy.installed_rules.emplace_back(step.device, *id);
  }
  return ok_status();
}

void DiversionEngine::uninstall(DiversionPolicy& policy) {
  for (auto it = policy.installed_rules.rbegin(); it != policy.installed_rules.rend(); ++it) {
    (void)dataplane_.remove_flow(it->first, it->second);
  }
  policy.installed_rules.clear();
}

void DiversionEngine::set_session_state(gtpu::UserSession& session, gtpu::SessionState state) {
  if (session.state == state) return;
  const gtpu::SessionState previous = session.state;
  session.state = state;
  if (listener_) listener_(session, previous);
}

Status DiversionEngine::set_policy(std::uint32_t teid, PolicyAction action, std::optional<HostId> portal) {
  gtpu::UserSession* session = sessions_.find(teid);
  if (session == nullptr) return Error{Errc::kUnknownTeid, "no session for teid " + std::to_string(teid)};

  DiversionPolicy next;
  next.teid = teid;
  next.action = action;
  if (action == PolicyAction::kDivert) {
    if (!portal) portal = default_portal_;
    if (!portal) return Error{Errc::kUnknownPortal, "no portal given and no default portal configured"};
    if (hosts_.find(*portal) == nullptr) {
      return Error{Errc::kUnknownPortal, "portal " + portal->to_string() + " is not registered"};
    }
    next.portal = portal;
  }
  if (action != PolicyAction::kAllow) {
    auto bbu = bbu_switch(*session);
    if (!bbu) return bbu.error();
  }

  std::optional<DiversionPolicy> previous;
  if (auto it = policies_.find(teid); it != policies_.end()) {
    previous = it->second;
    uninstall(it->second);
    policies_.erase(it);
  }
  if (action == PolicyAction::kAllow) {
    set_session_state(*session, gtpu::SessionState::kActive);
    return ok_status();
  }
  if (Status st = install(next, *session); !st.ok()) {
    if (previous && install(*previous, *session).ok()) policies_[teid] = *previous;
    else if (previous) set_session_state(*session, gtpu::SessionState::kActive);
    return st;
  }
  policies_[teid] = next;
  set_session_state(*session, action == PolicyAction::kDivert ? gtpu::SessionState::kDiverted
                                                               : gtpu::SessionState::kBlocked);
  return ok_status();
}

Result<HireOutcome> DiversionEngine::hire_service(const std::string& user_id, const std::string& service,
                                                  const std::string& billing_token) {
  std::vector<gtpu::UserSession*> sessions = sessions_.find_user(user_id);
  if (sessions.empty()) return Error{Errc::kUnknownUser, "no session for user " + user_id};
  const CatalogEntry* entry = catalog_.find(service);
  if (entry == nullptr) return Error{Errc::kUnknownService, "service " + service + " is not in the catalog"};

  HireOutcome out;
  for (gtpu::UserSession* session : sessions) {
    if (session->hired_services.count(service)) continue;
    out.newly_hired = true;
    session->hired_services.insert(service);
    session->billing[service] = billing_token;
    const std::uint32_t teid = session->teid;
    if (entry->grants_data) {
      const DiversionPolicy* p = policy(teid);
      if (p != nullptr && p->action == PolicyAction::kDivert) {
        if (Status st = set_policy(teid, PolicyAction::kAllow); st.ok()) out.released = true;
      }
    }
    // set_policy may notify listeners; re-find in case they touched the table.
    session = sessions_.find(teid);
    if (entry->bandwidth_mbps && session->rrh) {
      std::optional<HostId> bbu = session->bbu;
      if (!bbu) {
        if (auto dev = bbu_switch(*session); dev.ok()) {
          for (const EdgeHost& h : hosts_.list()) {
            if (h.role == HostRole::kBbu && h.device == *dev && !(default_portal_ && h.id() == *default_portal_)) {
              bbu = h.id();
              break;
            }
          }
        }
      }
      if (bbu) {
        auto id = intents_.submit_intent(*session->rrh, *bbu, entry->bandwidth_mbps);
        if (id.ok()) out.intent_id = *id;
      }
    }
  }
  return out;
}

bool DiversionEngine::first_packet_trigger(const PuntEvent& punt) {
  if (!punt.teid) return false;
  const gtpu::UserSession* session = sessions_.find(*punt.teid);
  if (session == nullptr || policies_.count(*punt.teid)) return false;
  if (!needs_data_service(*session) || !default_portal_) return false;
  return set_policy(*punt.teid, PolicyAction::kDivert, default_portal_).ok();
}

const DiversionPolicy* DiversionEngine::policy(std::uint32_t teid) const {
  auto it = policies_.find(teid);
  return it == policies_.end() ? nullptr : &it->second;
}

nlohmann::json DiversionEngine::snapshot() const {
  nlohmann::json sessions = nlohmann::json::array();
  for (const auto& [teid, s] : sessions_.sessions()) sessions.push_back(session_document(s));
  nlohmann::json policies = nlohmann::json::array();
  for (const auto& [teid, p] : policies_) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& [dev, id] : p.installed_rules) rules.push_back({{"device", dev.to_string()}, {"rule_id", id}});
    nlohmann::json doc{{"teid", teid}, {"action", std::string(to_string(p.action))}, {"rules", std::move(rules)}};
    if (p.portal) doc["portal"] = p.portal->to_string();
    policies.push_back(std::move(doc));
  }
  return {{"sessions", std::move(sessions)}, {"policies", std::move(policies)}};
}

Status DiversionEngine::restore(const nlohmann::json& doc) {
  gtpu::SessionTable sessions;
  std::map<std::uint32_t, DiversionPolicy> policies;
  try {
    for (const auto& s : doc.at("sessions")) {
      auto session = parse_session_snapshot(s);
      if (!session) return session.error();
      if (Status st = sessions.add(*session); !st.ok()) return st;
    }
    for (const auto& p : doc.at("policies")) {
      DiversionPolicy policy;
      policy.teid = p.at("teid").get<std::uint32_t>();
      auto action = parse_policy_action(p.at("action").get<std::string>());
      if (!action) return action.error();
      policy.action = *action;
      if (p.contains("portal")) {
        auto portal = HostId::parse(p.at("portal").get<std::string>());
        if (!portal) return portal.error();
        policy.portal = *portal;
      }
      for (const auto& r : p.at("rules")) {
        auto dev = DeviceId::parse(r.at("device").get<std::string>());
        if (!dev) return dev.error();
        policy.installed_rules.emplace_back(*dev, r.at("rule_id").get<std::uint64_t>());
      }
      policies[policy.teid] = std::move(policy);
    }
  } catch (const nlohmann::json::exception& e) {
    return Error{Errc::kInvalidArgument, std::string("bad diversion snapshot: ") + e.what()};
  }
  sessions_ = std::move(sessions);
  policies_ = std::move(policies);
  return ok_status();
}

}  // namespace fhctl
