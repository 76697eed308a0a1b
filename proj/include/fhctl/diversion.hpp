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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fhctl/gtpu.hpp"
#include "fhctl/intents.hpp"
#include "fhctl/simulator.hpp"
#include "json.hpp"

namespace fhctl {

/// Priority of per-user TEID rules; above every intent rule.
inline constexpr std::uint32_t kPolicyPriority = 1000;

enum class PolicyAction { kAllow, kDivert, kDrop };

std::string_view to_string(PolicyAction action);
Result<PolicyAction> parse_policy_action(std::string_view text);

/// Active non-ALLOW policy of one TEID. ALLOW is the absence of a policy.
struct DiversionPolicy {
  std::uint32_t teid = 0;
  PolicyAction action = PolicyAction::kAllow;
  std::optional<HostId> portal;
  std::vector<std::pair<DeviceId, std::uint64_t>> installed_rules;

  bool operator==(const DiversionPolicy&) const = default;
};

struct CatalogEntry {
  std::string name;
  std::optional<double> bandwidth_mbps;
  /// Whether hiring the service entitles the user to send data traffic.
  bool grants_data = true;
};

struct ServiceCatalog {
  std::vector<CatalogEntry> entries;

  const CatalogEntry* find(const std::string& name) const;
};

/// `[{"name": "...", "bandwidth": 100, "data": true}, ...]`.
Result<ServiceCatalog> parse_catalog(const nlohmann::json& doc);
nlohmann::json catalog_document(const ServiceCatalog& catalog);

struct HireOutcome {
  bool newly_hired = false;
  /// The DIVERT policy was lifted.
  bool released = false;
  std::optional<std::string> intent_id;
};

/// Per-user policy on top of the intent layer. Policy rules match the TEID
/// at kPolicyPriority and go through the bypass channel: transit rules from
/// the user's RRH switch to the BBU-side switch, then at the BBU-side switch
/// either an output toward the portal (with transit rules onward) or a drop.
/// Every rule also matches its in_port, so a walk that revisits a switch
/// stays unambiguous.
class DiversionEngine {
 public:
  using SessionListener = std::function<void(const gtpu::UserSession& session, gtpu::SessionState previous)>;

  DiversionEngine(Dataplane& dataplane, const HostRegistry& hosts, IntentEngine& intents);

  void set_listener(SessionListener listener) { listener_ = std::move(listener); }
  void set_catalog(ServiceCatalog catalog) { catalog_ = std::move(catalog); }
  const ServiceCatalog& catalog() const { return catalog_; }
  void set_default_portal(std::optional<HostId> portal) { default_portal_ = std::move(portal); }
  const std::optional<HostId>& default_portal() const { return default_portal_; }

  /// TEID 0 asks for the smallest free TEID. Returns the session's TEID.
  /// Errors: DUPLICATE_TEID, UNKNOWN_HOST (rrh or bbu given but unregistered).
  Result<std::uint32_t> create_session(gtpu::UserSession session);
  /// Replaces the TEID's policy. A failed install leaves the previous policy
  /// in place. Errors: UNKNOWN_TEID, UNKNOWN_PORTAL, NO_BBU_SWITCH, NO_PATH.
  Status set_policy(std::uint32_t teid, PolicyAction action, std::optional<HostId> portal = std::nullopt);
  /// Errors: UNKNOWN_USER, UNKNOWN_SERVICE.
  Result<HireOutcome> hire_service(const std::string& user_id, const std::string& service,
                                   const std::string& billing_token);
  /// Diverts a session's first unentitled packet to the default portal.
  /// Returns true when it installed a policy.
  bool first_packet_trigger(const PuntEvent& punt);

  const DiversionPolicy* policy(std::uint32_t teid) const;
  const std::map<std::uint32_t, DiversionPolicy>& policies() const { return policies_; }
  const gtpu::SessionTable& sessions() const { return sessions_; }

  /// Switch that enforces policy for the session.
  Result<DeviceId> bbu_switch(const gtpu::UserSession& session) const;

  nlohmann::json snapshot() const;
  Status restore(const nlohmann::json& doc);

 private:
  bool needs_data_service(const gtpu::UserSession& session) const;
  Status install(DiversionPolicy& policy, const gtpu::UserSession& session);
  void uninstall(DiversionPolicy& policy);
  void set_session_state(gtpu::UserSession& session, gtpu::SessionState state);

  Dataplane& dataplane_;
  const HostRegistry& hosts_;
  IntentEngine& intents_;
  SessionListener listener_;
  ServiceCatalog catalog_;
  std::optional<HostId> default_portal_;
  gtpu::SessionTable sessions_;
  std::map<std::uint32_t, DiversionPolicy> policies_;
};

}  // namespace fhctl
