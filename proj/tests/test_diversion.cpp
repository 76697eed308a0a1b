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

#include <gtest/gtest.h>

#include "fhctl/controller.hpp"
#include "support.hpp"

using namespace fhctl;
using namespace fhctl::test;

namespace {

gtpu::UserSession session(std::uint32_t teid, const std::string& user) {
  gtpu::UserSession s;
  s.teid = teid;
  s.user_id = user;
  s.rrh = rrh();
  s.bbu = bbu();
  return s;
}

ControllerConfig portal_config() {
  ControllerConfig config;
  config.default_portal = portal();
  config.catalog.entries = {{"voice", std::nullopt, false}, {"data-basic", 100.0, true}};
  return config;
}

TrafficFlow tunnel(const std::string& id, std::uint32_t teid, double stop_s = 2.0) {
  TrafficFlow f;
  f.flow_id = id;
  f.src_host = rrh();
  f.dst_host = bbu();
  f.offered_rate_mbps = 10.0;
  f.stop_s = stop_s;
  f.gtpu_teid = teid;
  return f;
}

SimReport simulate(Controller& ctl, std::vector<TrafficFlow> flows, double until_s = 3.0) {
  auto r = ctl.run_simulation({std::move(flows), until_s, 1, 0.5});
  if (!r) throw std::runtime_error(r.error().to_string());
  return *r;
}

std::uint64_t delivered_to(const FlowReport& f, const HostId& host) {
  auto it = f.delivered_to.find(host);
  return it == f.delivered_to.end() ? 0 : it->second;
}

}  // namespace

TEST(Diversion, SessionsGetUniqueTeids) {
  auto ctl = make_controller(reference_scenario(), portal_config());
  EXPECT_EQ(*ctl->create_session(session(7, "alice")), 7u);
  EXPECT_EQ(ctl->create_session(session(7, "bob")).error().code, Errc::kDuplicateTeid);
  EXPECT_EQ(*ctl->create_session(session(0, "bob")), 1u);
  EXPECT_EQ(*ctl->create_session(session(0, "carol")), 2u);
  auto ghost = session(0, "dave");
  ghost.rrh = host_id("00:00:00:00:09:09/None");
  EXPECT_EQ(ctl->create_session(ghost).error().code, Errc::kUnknownHost);
}

TEST(Diversion, PolicyErrors) {
  auto ctl = make_controller(reference_scenario());
  EXPECT_EQ(ctl->set_policy(7, PolicyAction::kDrop, std::nullopt).error().code, Errc::kUnknownTeid);
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  EXPECT_EQ(ctl->set_policy(7, PolicyAction::kDivert, std::nullopt).error().code, Errc::kUnknownPortal);
  EXPECT_EQ(ctl->set_policy(7, PolicyAction::kDivert, host_id("00:00:00:00:09:09/None")).error().code,
            Errc::kUnknownPortal);
  EXPECT_EQ(ctl->dataplane().rule_count(), 0u);
}

TEST(Diversion, PolicyRulesUseBypassAtTopPriority) {
  auto ctl = make_controller(reference_scenario());
  ASSERT_TRUE(ctl->submit_intent(rrh(), bbu(), std::nullopt));
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  const auto before = ctl->state_dump().at("dataplane");
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kDivert, portal()).ok());
  const DiversionPolicy* p = ctl->diversion().policy(7);
  ASSERT_NE(p, nullptr);
  ASSERT_FALSE(p->installed_rules.empty());
  for (const auto& [device, id] : p->installed_rules) {
    bool found = false;
    for (const FlowRule& r : ctl->dataplane().flow_table(device)) {
      if (r.rule_id != id) continue;
      found = true;
      EXPECT_EQ(r.priority, kPolicyPriority);
      EXPECT_EQ(r.origin, RuleOrigin::kBypass);
      EXPECT_EQ(r.match.teid, 7u);
      EXPECT_EQ(r.cookie, "policy:7");
    }
    EXPECT_TRUE(found);
  }
  // ALLOW removes exactly what the policy added.
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kAllow, std::nullopt).ok());
  EXPECT_EQ(ctl->diversion().policy(7), nullptr);
  EXPECT_EQ(ctl->state_dump().at("dataplane"), before);
}

TEST(Diversion, ActionsSteerTunnelTraffic) {
  auto ctl = make_controller(reference_scenario());
  ASSERT_TRUE(ctl->submit_intent(rrh(), bbu(), std::nullopt));
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  ASSERT_TRUE(ctl->create_session(session(8, "bob")));
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kDivert, portal()).ok());
  ASSERT_TRUE(ctl->set_policy(8, PolicyAction::kDrop, std::nullopt).ok());
  auto report = simulate(*ctl, {tunnel("alice", 7), tunnel("bob", 8), tunnel("carol", 9)});

  const FlowReport* alice = report.flow("alice");
  EXPECT_EQ(delivered_to(*alice, portal()), alice->sent);
  EXPECT_EQ(delivered_to(*alice, bbu()), 0u);
  const FlowReport* bob = report.flow("bob");
  EXPECT_EQ(bob->delivered, 0u);
  EXPECT_EQ(bob->drops.policy, bob->sent);
  // No policy: plain intent forwarding.
  const FlowReport* carol = report.flow("carol");
  EXPECT_EQ(delivered_to(*carol, bbu()), carol->sent);

  EXPECT_EQ(ctl->session_document_for(7)->at("state"), "DIVERTED");
  EXPECT_EQ(ctl->session_document_for(8)->at("state"), "BLOCKED");
}

TEST(Diversion, DivertWorksWithoutIntent) {
  auto ctl = make_controller(reference_scenario());
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kDivert, portal()).ok());
  auto report = simulate(*ctl, {tunnel("alice", 7)});
  EXPECT_EQ(delivered_to(*report.flow("alice"), portal()), report.flow("alice")->sent);
}

TEST(Diversion, FirstPacketDivertsUnentitledUser) {
  auto ctl = make_controller(reference_scenario(), portal_config());
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  auto report = simulate(*ctl, {tunnel("alice", 7)});
  const FlowReport* f = report.flow("alice");
  EXPECT_GT(f->sent, 0u);
  EXPECT_EQ(delivered_to(*f, portal()), f->sent);
  ASSERT_NE(ctl->diversion().policy(7), nullptr);
  EXPECT_EQ(ctl->diversion().policy(7)->action, PolicyAction::kDivert);
}

TEST(Diversion, VoiceOnlyUserIsStillDiverted) {
  auto ctl = make_controller(reference_scenario(), portal_config());
  auto s = session(7, "alice");
  s.hired_services = {"voice"};
  ASSERT_TRUE(ctl->create_session(s));
  (void)simulate(*ctl, {tunnel("alice", 7)});
  EXPECT_NE(ctl->diversion().policy(7), nullptr);
}

TEST(Diversion, HireReleasesAndInstallsIntent) {
  auto ctl = make_controller(reference_scenario(), portal_config());
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kDivert, portal()).ok());

  EXPECT_EQ(ctl->hire_service("nobody", "data-basic", "tok").error().code, Errc::kUnknownUser);
  EXPECT_EQ(ctl->hire_service("alice", "gold", "tok").error().code, Errc::kUnknownService);

  auto voice = ctl->hire_service("alice", "voice", "tok-v");
  ASSERT_TRUE(voice);
  EXPECT_TRUE(voice->newly_hired);
  EXPECT_FALSE(voice->released);
  EXPECT_NE(ctl->diversion().policy(7), nullptr);

  auto data = ctl->hire_service("alice", "data-basic", "tok-d");
  ASSERT_TRUE(data);
  EXPECT_TRUE(data->newly_hired);
  EXPECT_TRUE(data->released);
  ASSERT_TRUE(data->intent_id);
  EXPECT_EQ(ctl->diversion().policy(7), nullptr);
  auto intent = ctl->intent(*data->intent_id);
  ASSERT_TRUE(intent);
  EXPECT_EQ(intent->state, IntentState::kInstalled);
  EXPECT_EQ(*intent->bandwidth_mbps, 100.0);
  EXPECT_EQ(ctl->session_document_for(7)->at("state"), "ACTIVE");

  auto again = ctl->hire_service("alice", "data-basic", "tok-d");
  ASSERT_TRUE(again);
  EXPECT_FALSE(again->newly_hired);

  auto report = simulate(*ctl, {tunnel("alice", 7)});
  EXPECT_EQ(delivered_to(*report.flow("alice"), bbu()), report.flow("alice")->sent);
}

TEST(Diversion, PolicyReplacementIsClean) {
  auto ctl = make_controller(reference_scenario());
  ASSERT_TRUE(ctl->create_session(session(7, "alice")));
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kDivert, portal()).ok());
  ASSERT_TRUE(ctl->set_policy(7, PolicyAction::kDrop, std::nullopt).ok());
  std::size_t policy_rules = 0;
  for (const auto& [id, dev] : ctl->dataplane().topology().devices()) {
    for (const FlowRule& r : ctl->dataplane().flow_table(id)) {
      if (r.cookie == "policy:7") ++policy_rules;
    }
  }
  EXPECT_EQ(policy_rules, ctl->diversion().policy(7)->installed_rules.size());
  EXPECT_EQ(ctl->dataplane().rule_count(), policy_rules);
}
