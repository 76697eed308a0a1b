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

#include <random>

#include "fhctl/dataplane.hpp"
#include "fhctl/json_io.hpp"
#include "support.hpp"

using namespace fhctl;
using namespace fhctl::test;

namespace {

Dataplane reference_dataplane() { return Dataplane(*load_topology(reference_scenario())); }

MacAddress mac(int last) { return MacAddress({0, 0, 0, 0, 0, static_cast<std::uint8_t>(last)}); }

FlowRule rule_on(std::uint64_t device, std::uint32_t priority, std::vector<FlowAction> actions) {
  FlowRule r;
  r.device = dev(device);
  r.priority = priority;
  r.actions = std::move(actions);
  return r;
}

PacketHeader packet(int src, int dst) {
  PacketHeader p;
  p.eth_src = mac(src);
  p.eth_dst = mac(dst);
  return p;
}

}  // namespace

TEST(FlowMatch, WildcardsAndFields) {
  FlowMatch m;
  EXPECT_TRUE(m.matches(packet(1, 2), 3));
  m.in_port = 3;
  m.eth_dst = mac(2);
  EXPECT_TRUE(m.matches(packet(1, 2), 3));
  EXPECT_FALSE(m.matches(packet(1, 2), 4));
  EXPECT_FALSE(m.matches(packet(1, 5), 3));
  m.teid = 7;
  PacketHeader p = packet(1, 2);
  EXPECT_FALSE(m.matches(p, 3));
  p.teid = 7;
  EXPECT_TRUE(m.matches(p, 3));
}

TEST(Dataplane, PuntWhenNothingMatches) {
  Dataplane dp = reference_dataplane();
  EXPECT_TRUE(dp.match_packet(dev(1), packet(1, 2), 4).punt());
}

TEST(Dataplane, HigherPriorityWinsThenOlderRule) {
  Dataplane dp = reference_dataplane();
  auto low = dp.install_flow_standard(rule_on(1, 10, {FlowAction::output(2)}));
  auto high = dp.install_flow_standard(rule_on(1, 20, {FlowAction::output(3)}));
  auto high_twin = dp.install_flow_standard(rule_on(1, 20, {FlowAction::output(1)}));
  ASSERT_TRUE(low.ok() && high.ok() && high_twin.ok());
  auto hit = dp.match_packet(dev(1), packet(1, 2), 4);
  ASSERT_FALSE(hit.punt());
  EXPECT_EQ(hit.rule->rule_id, *high);
  ASSERT_TRUE(dp.remove_flow(dev(1), *high).ok());
  EXPECT_EQ(dp.match_packet(dev(1), packet(1, 2), 4).rule->rule_id, *high_twin);
  EXPECT_EQ(dp.remove_flow(dev(1), *high).error().code, Errc::kUnknownRule);
}

TEST(Dataplane, StandardChannelRefusesTeid) {
  Dataplane dp = reference_dataplane();
  FlowRule r = rule_on(1, 1000, {FlowAction::drop()});
  r.match.teid = 7;
  EXPECT_EQ(dp.install_flow_standard(r).error().code, Errc::kUnsupportedMatch);
  auto id = dp.install_flow_bypass(r);
  ASSERT_TRUE(id.ok());
  const FlowRule& installed = dp.flow_table(dev(1)).front();
  EXPECT_EQ(installed.origin, RuleOrigin::kBypass);
  EXPECT_EQ(installed.match.udp_dst, gtpu::kUdpPort);
}

TEST(Dataplane, RuleValidation) {
  Dataplane dp = reference_dataplane();
  EXPECT_EQ(dp.install_flow_standard(rule_on(1, 1, {FlowAction::output(1), FlowAction::output(2)})).error().code,
            Errc::kInvalidRule);
  EXPECT_EQ(dp.install_flow_standard(rule_on(1, 1, {FlowAction::drop(), FlowAction::output(2)})).error().code,
            Errc::kInvalidRule);
  EXPECT_EQ(dp.install_flow_standard(rule_on(9, 1, {FlowAction::drop()})).error().code, Errc::kUnknownDevice);
  FlowRule r = rule_on(1, 1, {FlowAction::drop()});
  r.match.teid = 1;
  r.match.udp_dst = 53;
  EXPECT_EQ(dp.install_flow_bypass(r).error().code, Errc::kInvalidRule);
}

TEST(Dataplane, QueueConfiguration) {
  Dataplane dp(*load_topology(pica8_scenario()));
  QueueConfig q{dev(1), 2, 1, QueueType::kLinuxHtb, 100.0};
  EXPECT_TRUE(dp.configure_queue(q).ok());
  EXPECT_EQ(dp.configure_queue(q).error().code, Errc::kBadQueue);  // id already on the port
  QueueConfig pica{dev(4), 1, 1, QueueType::kLinuxHtb, 100.0};
  EXPECT_EQ(dp.configure_queue(pica).error().code, Errc::kBadQueue);
  pica.queue_type = QueueType::kProntoStrict;
  EXPECT_TRUE(dp.configure_queue(pica).ok());
  EXPECT_EQ(dp.configure_queue({dev(1), 9, 1, QueueType::kLinuxHtb, 1.0}).error().code, Errc::kUnknownPort);
  EXPECT_EQ(dp.configure_queue({dev(1), 1, 2, QueueType::kLinuxHtb, 0.0}).error().code, Errc::kBadQueue);
  EXPECT_EQ(dp.queues().size(), 2u);
  const auto gen = dp.queue_generation(queue_key(q));
  ASSERT_TRUE(dp.remove_queue(dev(1), 2, 1).ok());
  ASSERT_TRUE(dp.configure_queue(q).ok());
  EXPECT_NE(dp.queue_generation(queue_key(q)), gen);
}

TEST(Dataplane, DumpRestoreRoundTrip) {
  Dataplane dp = reference_dataplane();
  FlowRule r = rule_on(2, 100, {FlowAction::set_queue(3), FlowAction::output(2)});
  r.match.eth_src = mac(1);
  r.match.in_port = 1;
  r.cookie = "0x1";
  ASSERT_TRUE(dp.install_flow_standard(r).ok());
  ASSERT_TRUE(dp.configure_queue({dev(2), 2, 3, QueueType::kLinuxHtb, 50.0}).ok());
  dp.topology().set_link_up(*dp.topology().link_from({dev(1), 3}), false);

  Dataplane copy = reference_dataplane();
  ASSERT_TRUE(copy.restore(dp.dump(), dp.next_rule_id()).ok());
  EXPECT_EQ(copy.dump(), dp.dump());
  EXPECT_EQ(copy.next_rule_id(), dp.next_rule_id());
  EXPECT_FALSE(copy.topology().link_up(*copy.topology().link_from({dev(1), 3})));
}

// Property: for random rule sets and packets, lookup equals a linear scan
// for the highest priority match with the smallest rule id.
TEST(DataplaneProperty, PrioritySemanticsMatchLinearScan) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Dataplane dp = reference_dataplane();
    std::vector<FlowRule> installed;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      FlowRule r = rule_on(1, static_cast<std::uint32_t>(rng() % 5) * 10, {FlowAction::output(1 + rng() % 4)});
      if (rng() % 2) r.match.eth_src = mac(static_cast<int>(rng() % 3));
      if (rng() % 2) r.match.eth_dst = mac(static_cast<int>(rng() % 3));
      if (rng() % 3 == 0) r.match.in_port = 1 + static_cast<std::uint32_t>(rng() % 4);
      auto id = dp.install_flow_standard(r);
      ASSERT_TRUE(id.ok());
      r.rule_id = *id;
      installed.push_back(r);
      if (rng() % 6 == 0 && !installed.empty()) {
        const std::size_t victim = rng() % installed.size();
        ASSERT_TRUE(dp.remove_flow(dev(1), installed[victim].rule_id).ok());
        installed.erase(installed.begin() + static_cast<std::ptrdiff_t>(victim));
      }
    }
    for (int probe = 0; probe < 20; ++probe) {
      const PacketHeader p = packet(static_cast<int>(rng() % 3), static_cast<int>(rng() % 3));
      const std::uint32_t in_port = 1 + static_cast<std::uint32_t>(rng() % 4);
      const FlowRule* best = nullptr;
      for (const FlowRule& r : installed) {
        if (!r.match.matches(p, in_port)) continue;
        if (!best || r.priority > best->priority || (r.priority == best->priority && r.rule_id < best->rule_id)) {
          best = &r;
        }
      }
      auto hit = dp.match_packet(dev(1), p, in_port);
      if (!best) {
        EXPECT_TRUE(hit.punt());
      } else {
        ASSERT_FALSE(hit.punt());
        EXPECT_EQ(hit.rule->rule_id, best->rule_id);
      }
    }
  }
}

// Property: rule documents survive a round trip.
TEST(RuleDocumentProperty, RoundTrip) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    FlowRule r = rule_on(1 + rng() % 4, static_cast<std::uint32_t>(rng() % 2000), {});
    r.rule_id = rng() % 100000;
    if (rng() % 2) r.match.in_port = 1 + rng() % 8;
    if (rng() % 2) r.match.eth_src = mac(static_cast<int>(rng() % 200));
    if (rng() % 2) r.match.ip_dst = Ipv4Address(static_cast<std::uint32_t>(rng()));
    if (rng() % 3 == 0) {
      r.match.teid = static_cast<std::uint32_t>(rng());
      r.match.udp_dst = gtpu::kUdpPort;
    }
    if (rng() % 2) r.actions.push_back(FlowAction::set_queue(1 + rng() % 8));
    r.actions.push_back(rng() % 4 ? FlowAction::output(1 + rng() % 4) : FlowAction::drop());
    r.origin = rng() % 2 ? RuleOrigin::kBypass : RuleOrigin::kStandard;
    r.cookie = "c" + std::to_string(rng() % 50);
    auto back = parse_rule_document(rule_document(r));
    ASSERT_TRUE(back.ok()) << back.error().to_string();
    EXPECT_EQ(*back, r);
  }
}
