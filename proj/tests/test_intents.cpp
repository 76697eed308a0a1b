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

#include "fhctl/controller.hpp"
#include "support.hpp"

using namespace fhctl;
using namespace fhctl::test;

namespace {

// The parts of the state dump a failed compile must leave untouched.
std::string footprint(const Controller& ctl) {
  auto dump = ctl.state_dump();
  return dump.at("dataplane").dump() + "\n" + dump.at("reservations").dump();
}

EdgeIntent submit(Controller& ctl, const HostId& one, const HostId& two, std::optional<double> bw = std::nullopt) {
  auto r = ctl.submit_intent(one, two, bw);
  if (!r) throw std::runtime_error(r.error().to_string());
  return *r;
}

void expect_clean_failure(const EdgeIntent& i, FailureReason reason) {
  EXPECT_EQ(i.state, IntentState::kPendingAdd);
  ASSERT_TRUE(i.failure_reason);
  EXPECT_EQ(*i.failure_reason, reason);
  EXPECT_TRUE(i.rules.empty());
  EXPECT_TRUE(i.queues.empty());
  EXPECT_TRUE(i.reserved_links.empty());
  EXPECT_FALSE(i.path);
  EXPECT_FALSE(i.queue_id);
}

std::vector<DeviceId> devices(std::initializer_list<std::uint64_t> ns) {
  std::vector<DeviceId> out;
  for (auto n : ns) out.push_back(dev(n));
  return out;
}

}  // namespace

TEST(Intents, PlainIntentInstallsBidirectionalRules) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, rrh(), bbu());
  EXPECT_EQ(i.id, "0x1");
  EXPECT_EQ(i.state, IntentState::kInstalled);
  EXPECT_EQ(*i.path, devices({1, 2, 4}));
  EXPECT_EQ(i.rules.size(), 6u);
  EXPECT_TRUE(i.queues.empty());
  EXPECT_FALSE(i.queue_id);
  EXPECT_TRUE(i.reserved_links.empty());
  EXPECT_EQ(ctl->dataplane().rule_count(), 6u);
  EXPECT_TRUE(ctl->intents().connected(bbu(), rrh()));
}

TEST(Intents, BandwidthIntentPlacesTwoQueuesWithOneId) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  ASSERT_EQ(i.state, IntentState::kInstalled);
  ASSERT_EQ(i.queues.size(), 2u);
  EXPECT_EQ(*i.queue_id, 1u);
  EXPECT_EQ(i.queues[0].port, (PortRef{dev(1), 2}));
  EXPECT_EQ(i.queues[1].port, (PortRef{dev(4), 1}));
  for (const auto& q : i.queues) {
    EXPECT_EQ(q.queue_id, 1u);
    const QueueConfig* cfg = ctl->dataplane().find_queue(q.port.device, q.port.port, 1);
    ASSERT_NE(cfg, nullptr);
    EXPECT_DOUBLE_EQ(cfg->max_rate_mbps, 100.0);
    EXPECT_EQ(cfg->queue_type, QueueType::kLinuxHtb);
  }
  // Both directions of both hops are reserved.
  EXPECT_EQ(i.reserved_links.size(), 4u);
  for (const auto& l : i.reserved_links) EXPECT_DOUBLE_EQ(ctl->intents().reservations().reserved(l), 100.0);

  // SET_QUEUE only on the forward rules of the first and last device.
  std::size_t set_queue = 0;
  for (const auto& [device, rule_id] : i.rules) {
    for (const FlowRule& r : ctl->dataplane().flow_table(device)) {
      if (r.rule_id != rule_id) continue;
      for (const auto& a : r.actions) {
        if (a.type == ActionType::kSetQueue) {
          ++set_queue;
          EXPECT_TRUE(device == dev(1) || device == dev(4));
        }
      }
    }
  }
  EXPECT_EQ(set_queue, 2u);
}

TEST(Intents, SingleDevicePathUsesOneQueue) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, portal(), bbu(), 50.0);
  ASSERT_EQ(i.state, IntentState::kInstalled);
  EXPECT_EQ(*i.path, devices({4}));
  ASSERT_EQ(i.queues.size(), 1u);
  EXPECT_EQ(i.queues[0].port, (PortRef{dev(4), 1}));
  EXPECT_TRUE(i.reserved_links.empty());
}

TEST(Intents, MalformedRequests) {
  auto ctl = make_controller(reference_scenario());
  EXPECT_EQ(ctl->submit_intent(rrh(), rrh(), std::nullopt).error().code, Errc::kInvalidArgument);
  EXPECT_EQ(ctl->submit_intent(rrh(), bbu(), 0.0).error().code, Errc::kInvalidArgument);
  EXPECT_EQ(ctl->submit_intent(rrh(), bbu(), -5.0).error().code, Errc::kInvalidArgument);
  EXPECT_TRUE(ctl->intents().list().empty());
}

TEST(Intents, UnknownHostIsRecordedAsFailure) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, rrh(), host_id("00:00:00:00:09:09/None"));
  expect_clean_failure(i, FailureReason::kUnknownHost);
  EXPECT_EQ(*i.failure_detail, "00:00:00:00:09:09/None");
}

TEST(Intents, WithdrawRemovesEverything) {
  auto ctl = make_controller(reference_scenario());
  const auto before = footprint(*ctl);
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  ASSERT_TRUE(ctl->withdraw_intent(i.id).ok());
  EXPECT_EQ(footprint(*ctl), before);
  // Withdrawn intents are forgotten.
  EXPECT_FALSE(ctl->intent(i.id));
  EXPECT_FALSE(ctl->intents().connected(rrh(), bbu()));
  EXPECT_EQ(ctl->withdraw_intent("0x99").error().code, Errc::kUnknownIntent);
  EXPECT_EQ(ctl->retry_intent("0x99").error().code, Errc::kUnknownIntent);
}

TEST(Intents, RetryNeedsAFailedPendingIntent) {
  auto ctl = make_controller(reference_scenario());
  auto ok = submit(*ctl, rrh(), bbu());
  EXPECT_EQ(ctl->retry_intent(ok.id).error().code, Errc::kInvalidState);

  auto big = submit(*ctl, rrh(), portal(), 1500.0);
  expect_clean_failure(big, FailureReason::kCapacityExceeded);
  auto again = ctl->retry_intent(big.id);
  ASSERT_TRUE(again);
  EXPECT_EQ(again->state, IntentState::kPendingAdd);
  EXPECT_EQ(*again->failure_reason, FailureReason::kCapacityExceeded);
}

TEST(Intents, HostInUseBlocksRemoval) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, rrh(), bbu());
  EXPECT_EQ(ctl->remove_host(rrh()).error().code, Errc::kHostInUse);
  ASSERT_TRUE(ctl->withdraw_intent(i.id).ok());
  EXPECT_TRUE(ctl->remove_host(rrh()).ok());
}

TEST(Intents, LinkDownReroutesAndThenFails) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  ASSERT_EQ(*i.path, devices({1, 2, 4}));

  auto report = ctl->kill_link(dev(2), dev(1));
  ASSERT_TRUE(report) << report.error().to_string();
  EXPECT_EQ(report->rerouted, std::vector<std::string>{i.id});
  auto moved = *ctl->intent(i.id);
  EXPECT_EQ(moved.state, IntentState::kInstalled);
  EXPECT_EQ(*moved.path, devices({1, 3, 4}));
  EXPECT_EQ(moved.queues[0].port, (PortRef{dev(1), 3}));
  // Nothing reserved on the dead link any more.
  EXPECT_DOUBLE_EQ(ctl->intents().reservations().reserved({dev(1), 2}), 0.0);
  EXPECT_DOUBLE_EQ(ctl->intents().reservations().reserved({dev(1), 3}), 100.0);

  report = ctl->kill_link(dev(1), dev(3));
  ASSERT_TRUE(report);
  EXPECT_EQ(report->failed, std::vector<std::string>{i.id});
  expect_clean_failure(*ctl->intent(i.id), FailureReason::kNoPath);
  EXPECT_EQ(ctl->dataplane().rule_count(), 0u);
  EXPECT_TRUE(ctl->dataplane().queues().empty());
  EXPECT_TRUE(ctl->intents().reservations().entries().empty());

  EXPECT_EQ(ctl->kill_link(dev(1), dev(4)).error().code, Errc::kUnknownLink);
}

TEST(Intents, UnrelatedLinkDownLeavesIntentAlone) {
  auto ctl = make_controller(reference_scenario());
  auto i = submit(*ctl, rrh(), bbu());
  const auto before = ctl->state_dump().at("intents");
  auto report = ctl->kill_link(dev(3), dev(4));
  ASSERT_TRUE(report);
  EXPECT_EQ(report->recompiled(), 0u);
  EXPECT_EQ(ctl->state_dump().at("intents"), before);
  (void)i;
}

TEST(Intents, QueueIdsGrowPerPort) {
  auto ctl = make_controller(reference_scenario());
  auto a = submit(*ctl, rrh(), bbu(), 100.0);
  auto b = submit(*ctl, rrh(), bbu(), 100.0);
  EXPECT_EQ(*a.queue_id, 1u);
  EXPECT_EQ(*b.queue_id, 2u);
  ASSERT_TRUE(ctl->withdraw_intent(a.id).ok());
  auto c = submit(*ctl, rrh(), bbu(), 100.0);
  EXPECT_EQ(*c.queue_id, 1u);
}

// Atomic rollback: each failure mode is induced on top of live state, and
// the dataplane and reservations must match the pre-submit dump exactly.

TEST(Rollback, NoPath) {
  auto ctl = make_controller(reference_scenario());
  submit(*ctl, portal(), bbu(), 100.0);
  ASSERT_TRUE(ctl->kill_link(dev(1), dev(2)));
  ASSERT_TRUE(ctl->kill_link(dev(1), dev(3)));
  const auto before = footprint(*ctl);
  expect_clean_failure(submit(*ctl, rrh(), bbu(), 100.0), FailureReason::kNoPath);
  expect_clean_failure(submit(*ctl, rrh(), bbu()), FailureReason::kNoPath);
  EXPECT_EQ(footprint(*ctl), before);
}

TEST(Rollback, CapacityExceeded) {
  auto ctl = make_controller(reference_scenario());
  ASSERT_EQ(submit(*ctl, rrh(), portal(), 600.0).state, IntentState::kInstalled);
  ASSERT_EQ(submit(*ctl, rrh(), portal(), 300.0).state, IntentState::kInstalled);
  const auto before = footprint(*ctl);
  expect_clean_failure(submit(*ctl, rrh(), bbu(), 1500.0), FailureReason::kCapacityExceeded);
  EXPECT_EQ(footprint(*ctl), before);
}

TEST(Rollback, BadQueueAfterPartialPlacement) {
  ControllerConfig config;
  config.strict_negotiation = true;
  auto ctl = make_controller(pica8_scenario(), config);
  ASSERT_EQ(submit(*ctl, rrh(), portal()).state, IntentState::kInstalled);
  const auto before = footprint(*ctl);
  // The ingress queue on the generic switch is accepted first, then the
  // pica8 egress rejects LINUX_HTB.
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  expect_clean_failure(i, FailureReason::kBadQueue);
  EXPECT_EQ(*i.failure_device, dev(4));
  EXPECT_EQ(footprint(*ctl), before);
}

TEST(Rollback, NoCommonType) {
  ControllerConfig config;
  config.negotiation.default_order = {QueueType::kLinuxHtb};
  auto ctl = make_controller(pica8_scenario(), config);
  const auto before = footprint(*ctl);
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  expect_clean_failure(i, FailureReason::kBadQueue);
  EXPECT_EQ(*i.failure_detail, "NO_COMMON_TYPE");
  EXPECT_EQ(footprint(*ctl), before);
}

TEST(Rollback, QueueIdConflictFromAnotherIntent) {
  auto ctl = make_controller(reference_scenario());
  // Holds queue 1 on the BBU port; the ingress port of the next intent is
  // still empty, so it picks 1 as well.
  ASSERT_EQ(submit(*ctl, portal(), bbu(), 100.0).state, IntentState::kInstalled);
  const auto before = footprint(*ctl);
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  expect_clean_failure(i, FailureReason::kBadQueue);
  EXPECT_EQ(*i.failure_detail, "QUEUE_ID_CONFLICT");
  EXPECT_EQ(*i.failure_device, dev(4));
  EXPECT_EQ(footprint(*ctl), before);
}

TEST(Rollback, QueueIdConflictFromForeignQueue) {
  auto ctl = make_controller(reference_scenario());
  ASSERT_TRUE(ctl->dataplane().configure_queue({dev(4), 1, 1, QueueType::kLinuxHtb, 10.0}).ok());
  const auto before = footprint(*ctl);
  auto i = submit(*ctl, rrh(), bbu(), 100.0);
  expect_clean_failure(i, FailureReason::kBadQueue);
  EXPECT_EQ(*i.failure_detail, "QUEUE_ID_CONFLICT");
  EXPECT_EQ(footprint(*ctl), before);
}

// Random operation sequences; after every step the dataplane holds exactly
// what the installed intents account for, and failed steps change nothing.
TEST(IntentsProperty, DataplaneMatchesIntentLedger) {
  std::mt19937_64 rng(20261014);
  const std::vector<HostId> hosts{rrh(), bbu(), portal()};
  for (int round = 0; round < 60; ++round) {
    ControllerConfig config;
    config.strict_negotiation = round % 3 == 0;
    auto ctl = make_controller(round % 2 ? pica8_scenario() : reference_scenario(), config);
    std::vector<std::string> ids;
    for (int step = 0; step < 25; ++step) {
      const auto before = footprint(*ctl);
      const int op = static_cast<int>(rng() % 10);
      bool should_be_noop = false;
      if (op < 6) {
        const auto a = rng() % 3;
        const auto b = (a + 1 + rng() % 2) % 3;
        std::optional<double> bw;
        if (rng() % 4) {
          bw = static_cast<double>(50 * (1 + rng() % 24));
        }
        auto i = submit(*ctl, hosts[a], hosts[b], bw);
        ids.push_back(i.id);
        should_be_noop = i.state != IntentState::kInstalled;
      } else if (op < 8 && !ids.empty()) {
        const auto pick = rng() % ids.size();
        const auto st = ctl->intent(ids[pick])->state;
        ASSERT_TRUE(ctl->withdraw_intent(ids[pick]).ok());
        should_be_noop = st != IntentState::kInstalled;
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(pick));
      } else if (op < 9 && !ids.empty()) {
        auto r = ctl->retry_intent(ids[rng() % ids.size()]);
        should_be_noop = !r || r->state != IntentState::kInstalled;
      } else {
        const auto& links = ctl->dataplane().topology().links();
        const auto& l = links[rng() % links.size()];
        (void)ctl->kill_link(l.src.device, l.dst.device);
      }
      if (should_be_noop) {
        ASSERT_EQ(footprint(*ctl), before) << "round " << round << " step " << step;
      }

      std::size_t rules = 0, queues = 0;
      std::map<PortRef, double> expected;
      for (const EdgeIntent* i : ctl->intents().list()) {
        if (i->state != IntentState::kInstalled) {
          ASSERT_TRUE(i->rules.empty() && i->queues.empty() && i->reserved_links.empty());
          continue;
        }
        rules += i->rules.size();
        queues += i->queues.size();
        ASSERT_EQ(i->rules.size(), 2 * i->path->size());
        if (i->bandwidth_mbps) {
          ASSERT_EQ(i->queues.size(), i->path->size() == 1 ? 1u : 2u);
          for (const auto& q : i->queues) {
            ASSERT_EQ(q.queue_id, *i->queue_id);
            ASSERT_NE(ctl->dataplane().find_queue(q.port.device, q.port.port, q.queue_id), nullptr);
          }
          for (const auto& l : i->reserved_links) expected[l] += *i->bandwidth_mbps;
        }
      }
      ASSERT_EQ(ctl->dataplane().rule_count(), rules);
      ASSERT_EQ(ctl->dataplane().queues().size(), queues);
      const auto& entries = ctl->intents().reservations().entries();
      ASSERT_EQ(entries.size(), expected.size());
      const Topology& topo = ctl->dataplane().topology();
      for (const auto& [port, mbps] : entries) {
        ASSERT_NEAR(mbps, expected[port], 1e-6);
        ASSERT_LE(mbps, topo.link(*topo.link_from(port)).capacity_mbps + 1e-6);
      }
    }
  }
}
