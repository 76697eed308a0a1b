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

#include <thread>

#include "fhctl/controller.hpp"
#include "support.hpp"

using namespace fhctl;
using namespace fhctl::test;
using namespace std::chrono_literals;

namespace {

PuntEvent punt_between(const HostId& src, const HostId& dst, double t) {
  PuntEvent p;
  p.time_s = t;
  p.device = dev(1);
  p.in_port = 4;
  p.eth_src = src.mac;
  p.eth_dst = dst.mac;
  return p;
}

std::size_t count_type(const EventLog& log, const std::string& type) {
  std::size_t n = 0;
  for (const auto& r : log.since(0)) n += r.type == type;
  return n;
}

}  // namespace

TEST(EventLog, SequenceIsDenseFromOne) {
  EventLog log;
  EXPECT_EQ(log.head(), 0u);
  EXPECT_EQ(log.append("a", 0.0, {}), 1u);
  EXPECT_EQ(log.append("b", 0.5, {{"k", 1}}), 2u);
  EXPECT_EQ(log.append("c", 1.0, {}), 3u);
  auto tail = log.since(1);
  ASSERT_EQ(tail.size(), 2u);
  EXPECT_EQ(tail[0].seq, 2u);
  EXPECT_EQ(tail[0].to_json(), (nlohmann::json{{"seq", 2}, {"type", "b"}, {"time", 0.5}, {"data", {{"k", 1}}}}));
  EXPECT_TRUE(log.since(3).empty());
  EXPECT_TRUE(log.since(99).empty());
}

TEST(EventLog, SnapshotRoundTrip) {
  EventLog log;
  log.append("a", 0.0, {{"x", "y"}});
  log.append("b", 2.0, nullptr);
  EventLog copy;
  ASSERT_TRUE(copy.restore(log.snapshot()).ok());
  EXPECT_EQ(copy.snapshot(), log.snapshot());
  EXPECT_EQ(copy.append("c", 3.0, {}), 3u);
}

TEST(EventLog, WaitForWakesOnAppend) {
  EventLog log;
  EXPECT_FALSE(log.wait_for(0, 10ms));
  std::thread writer([&] {
    std::this_thread::sleep_for(20ms);
    log.append("a", 0.0, {});
  });
  EXPECT_TRUE(log.wait_for(0, 5s));
  writer.join();
  EXPECT_TRUE(log.wait_for(0, 0ms));
  EXPECT_FALSE(log.wait_for(1, 10ms));
}

TEST(EventLog, InterruptReleasesWaiters) {
  EventLog log;
  std::thread stopper([&] {
    std::this_thread::sleep_for(20ms);
    log.interrupt();
  });
  const auto start = std::chrono::steady_clock::now();
  EXPECT_FALSE(log.wait_for(0, 10s));
  EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
  stopper.join();
}

TEST(Alerts, CountsAreExactEventsAreCoalesced) {
  auto ctl = make_controller(reference_scenario());
  double now = 0.0;
  ctl->set_clock([&] { return now; });
  const auto head = ctl->events().head();
  // 40 punts over 4 s of controller time.
  for (int i = 0; i < 40; ++i) {
    now = 0.1 * i;
    (void)ctl->handle_punt(punt_between(rrh(), bbu(), now));
  }
  const DetectedPair* pair = ctl->alerts().find(bbu(), rrh());
  ASSERT_NE(pair, nullptr);
  EXPECT_EQ(pair->packet_count, 40u);
  EXPECT_EQ(pair->rrh, rrh());
  EXPECT_EQ(pair->bbu, bbu());
  EXPECT_DOUBLE_EQ(pair->first_seen_s, 0.0);
  EXPECT_NEAR(pair->last_seen_s, 3.9, 1e-9);
  EXPECT_FALSE(pair->acknowledged);

  std::vector<double> times;
  for (const auto& r : ctl->events().since(head)) {
    if (r.type == event_type::kPairDetected) times.push_back(r.time_s);
  }
  ASSERT_FALSE(times.empty());
  EXPECT_LE(times.size(), 5u);
  for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i] - times[i - 1], 1.0 - 1e-9);
}

TEST(Alerts, SameRoleOrUnknownPuntsAreUnmatched) {
  auto ctl = make_controller(reference_scenario());
  (void)ctl->handle_punt(punt_between(bbu(), portal(), 0.0));
  (void)ctl->handle_punt(punt_between(rrh(), host_id("00:00:00:00:09:09/None"), 0.0));
  EXPECT_EQ(ctl->alerts().unmatched_punts(), 2u);
  EXPECT_EQ(ctl->alerts().total_punts(), 2u);
  EXPECT_TRUE(ctl->alerts().pairs().empty());
}

TEST(Alerts, InstalledIntentAcknowledgesAndFreezesCount) {
  auto ctl = make_controller(reference_scenario());
  for (int i = 0; i < 3; ++i) (void)ctl->handle_punt(punt_between(rrh(), bbu(), 0.0));
  auto intent = ctl->submit_intent(bbu(), rrh(), std::nullopt);
  ASSERT_TRUE(intent);
  const DetectedPair* pair = ctl->alerts().find(rrh(), bbu());
  ASSERT_NE(pair, nullptr);
  EXPECT_TRUE(pair->acknowledged);
  EXPECT_EQ(count_type(ctl->events(), event_type::kPairConnected), 1u);
  // Stray punts while connected do not count.
  (void)ctl->handle_punt(punt_between(rrh(), bbu(), 0.0));
  EXPECT_EQ(ctl->alerts().find(rrh(), bbu())->packet_count, 3u);
  // Once the intent is gone a new punt reopens the pair at once.
  ASSERT_TRUE(ctl->withdraw_intent(intent->id).ok());
  const auto detected = count_type(ctl->events(), event_type::kPairDetected);
  (void)ctl->handle_punt(punt_between(rrh(), bbu(), 0.0));
  EXPECT_FALSE(ctl->alerts().find(rrh(), bbu())->acknowledged);
  EXPECT_EQ(count_type(ctl->events(), event_type::kPairDetected), detected + 1);
}

TEST(ControllerEvents, MutationsAppendTypedRecords) {
  auto ctl = make_controller(reference_scenario());
  const auto head = ctl->events().head();
  auto intent = ctl->submit_intent(rrh(), bbu(), std::nullopt);
  ASSERT_TRUE(ctl->withdraw_intent(intent->id).ok());
  ASSERT_TRUE(ctl->kill_link(dev(1), dev(2)));
  auto records = ctl->events().since(head);
  ASSERT_FALSE(records.empty());
  for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(records[i].seq, head + 1 + i);
  std::vector<std::string> states;
  for (const auto& r : records) {
    if (r.type == event_type::kIntentStateChanged) states.push_back(r.data.at("state"));
  }
  EXPECT_EQ(states, (std::vector<std::string>{"PENDING_ADD", "INSTALLED", "PENDING_REMOVE", "WITHDRAWN"}));
  EXPECT_EQ(records.back().type, event_type::kLinkStateChanged);
  EXPECT_EQ(ctl->state_dump().at("events_head"), ctl->events().head());
}
