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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fhctl/host_registry.hpp"
#include "fhctl/intents.hpp"
#include "fhctl/simulator.hpp"
#include "json.hpp"

namespace fhctl {

namespace event_type {
inline constexpr const char* kHostAdded = "host-added";
inline constexpr const char* kHostRemoved = "host-removed";
inline constexpr const char* kIntentStateChanged = "intent-state-changed";
inline constexpr const char* kPairDetected = "pair-detected";
inline constexpr const char* kPairConnected = "pair-connected";
inline constexpr const char* kSessionStateChanged = "session-state-changed";
inline constexpr const char* kSimReportReady = "sim-report-ready";
inline constexpr const char* kLinkStateChanged = "link-state-changed";
}  // namespace event_type

struct EventRecord {
  std::uint64_t seq = 0;
  std::string type;
  double time_s = 0.0;
  nlohmann::json data;

  nlohmann::json to_json() const;
};

/// Append-only stream. Sequence numbers start at 1 and have no gaps.
/// Thread-safe; readers may block waiting for new records.
class EventLog {
 public:
  std::uint64_t append(std::string type, double time_s, nlohmann::json data);
  /// Records with seq > `since`, oldest first.
  std::vector<EventRecord> since(std::uint64_t since) const;
  std::uint64_t head() const;
  /// Blocks until a record with seq > `since` exists, the timeout passes, or
  /// `interrupt()` is called. Returns whether new records exist.
  bool wait_for(std::uint64_t since, std::chrono::milliseconds timeout) const;
  void interrupt();

  nlohmann::json snapshot() const;
  Status restore(const nlohmann::json& doc);

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<EventRecord> records_;
  bool interrupted_ = false;
};

struct DetectedPair {
  HostId rrh;
  HostId bbu;
  double first_seen_s = 0.0;
  double last_seen_s = 0.0;
  std::uint64_t packet_count = 0;
  /// An intent connected the pair; the count is frozen from then on.
  bool acknowledged = false;
  /// Controller time of the last stream event about this pair.
  double last_event_s = 0.0;

  nlohmann::json to_json() const;
};

/// Turns punts into RRH/BBU traffic alerts. Counts are exact; stream events
/// per pair are coalesced to at most one per second of controller time.
class AlertProcessor {
 public:
  using Emit = std::function<void(const char* type, nlohmann::json data)>;

  void set_emitter(Emit emit) { emit_ = std::move(emit); }

  void on_punt(const PuntEvent& punt, const HostRegistry& hosts, const IntentEngine& intents, double now_s);
  /// Marks the pair joined by a newly INSTALLED intent.
  void on_intent_installed(const EdgeIntent& intent, double now_s);

  const DetectedPair* find(const HostId& a, const HostId& b) const;
  std::vector<DetectedPair> pairs() const;
  std::uint64_t unmatched_punts() const { return unmatched_; }
  std::uint64_t total_punts() const { return total_; }

  nlohmann::json snapshot() const;
  Status restore(const nlohmann::json& doc);

 private:
  using Key = std::pair<HostId, HostId>;
  static Key key_of(const HostId& a, const HostId& b) { return a < b ? Key{a, b} : Key{b, a}; }

  static constexpr double kCoalesceSeconds = 1.0;

  Emit emit_;
  std::map<Key, DetectedPair> pairs_;
  std::uint64_t unmatched_ = 0;
  std::uint64_t total_ = 0;
};

}  // namespace fhctl
