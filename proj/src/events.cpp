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

#include "fhctl/events.hpp"

namespace fhctl {

using nlohmann::json;

json EventRecord::to_json() const { return {{"seq", seq}, {"type", type}, {"time", time_s}, {"data", data}}; }

std::uint64_t EventLog::append(std::string type, double time_s, json data) {
  std::uint64_t seq;
  {
    std::lock_guard lock(mu_);
    seq = records_.size() + 1;
    records_.push_back({seq, std::move(type), time_s, std::move(data)});
  }
  cv_.notify_all();
  return seq;
}

std::vector<EventRecord> EventLog::since(std::uint64_t since) const {
  std::lock_guard lock(mu_);
  if (since >= records_.size()) return {};
  return {records_.begin() + static_cast<std::ptrdiff_t>(since), records_.end()};
}

std::uint64_t EventLog::head() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

bool EventLog::wait_for(std::uint64_t since, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return records_.size() > since || interrupted_; });
  return records_.size() > since;
}

void EventLog::interrupt() {
  {
    std::lock_guard lock(mu_);
    interrupted_ = true;
  }
  cv_.notify_all();
}

json EventLog::snapshot() const {
  std::lock_guard lock(mu_);
  json out = json::array();
  for (const EventRecord& r : records_) out.push_back(r.to_json());
  return out;
}

Status EventLog::restore(const json& doc) {
  std::vector<EventRecord> records;
  try {
    for (const auto& r : doc) {
      EventRecord rec{r.at("seq").get<std::uint64_t>(), r.at("type").get<std::string>(), r.at("time").get<double>(),
                      r.at("data")};
      if (rec.seq != records.size() + 1) return Error{Errc::kInvalidArgument, "event snapshot has a sequence gap"};
      records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    return Error{Errc::kInvalidArgument, std::string("bad event snapshot: ") + e.what()};
  }
  {
    std::lock_guard lock(mu_);
    records_ = std::move(records);
  }
  cv_.notify_all();
  return ok_status();
}

json DetectedPair::to_json() const {
  return {{"rrh", rrh.to_string()},     {"bbu", bbu.to_string()},
          {"first_seen", first_seen_s}, {"last_seen", last_seen_s},
          {"packet_count", packet_count}, {"acknowledged", acknowledged},
          {"last_event", last_event_s}};
}

void AlertProcessor::on_punt(const PuntEvent& punt, const HostRegistry& hosts, const IntentEngine& intents,
                             double now_s) {
  ++total_;
  const EdgeHost* src = hosts.find_mac(punt.eth_src);
  const EdgeHost* dst = hosts.find_mac(punt.eth_dst);
  if (src == nullptr || dst == nullptr || src->role == dst->role) {
    ++unmatched_;
    return;
  }
  const EdgeHost* rrh = src->role == HostRole::kRrh ? src : dst;
  const EdgeHost* bbu = src->role == HostRole::kRrh ? dst : src;
  if (intents.connected(rrh->id(), bbu->id())) return;

  auto [it, created] = pairs_.try_emplace(key_of(rrh->id(), bbu->id()));
  DetectedPair& pair = it->second;
  if (created) {
    pair.rrh = rrh->id();
    pair.bbu = bbu->id();
    pair.first_seen_s = now_s;
  }
  // Punting again means the connecting intent is gone.
  const bool reopened = pair.acknowledged;
  pair.acknowledged = false;
  ++pair.packet_count;
  pair.last_seen_s = now_s;
  if (created || reopened || now_s - pair.last_event_s >= kCoalesceSeconds) {
    pair.last_event_s = now_s;
    if (emit_) emit_(event_type::kPairDetected, pair.to_json());
  }
}

void AlertProcessor::on_intent_installed(const EdgeIntent& intent, double now_s) {
  auto it = pairs_.find(key_of(intent.one, intent.two));
  if (it == pairs_.end() || it->second.acknowledged) return;
  it->second.acknowledged = true;
  it->second.last_event_s = now_s;
  if (emit_) {
    json data = it->second.to_json();
    data["intent"] = intent.id;
    emit_(event_type::kPairConnected, std::move(data));
  }
}

const DetectedPair* AlertProcessor::find(const HostId& a, const HostId& b) const {
  auto it = pairs_.find(key_of(a, b));
  return it == pairs_.end() ? nullptr : &it->second;
}

std::vector<DetectedPair> AlertProcessor::pairs() const {
  std::vector<DetectedPair> out;
  for (const auto& [key, pair] : pairs_) out.push_back(pair);
  return out;
}

json AlertProcessor::snapshot() const {
  json pairs = json::array();
  for (const auto& [key, pair] : pairs_) pairs.push_back(pair.to_json());
  return {{"pairs", std::move(pairs)}, {"unmatched_punts", unmatched_}, {"total_punts", total_}};
}

Status AlertProcessor::restore(const json& doc) {
  std::map<Key, DetectedPair> pairs;
  try {
    for (const auto& p : doc.at("pairs")) {
      DetectedPair pair;
      auto rrh = HostId::parse(p.at("rrh").get<std::string>());
      auto bbu = HostId::parse(p.at("bbu").get<std::string>());
      if (!rrh) return rrh.error();
      if (!bbu) return bbu.error();
      pair.rrh = *rrh;
      pair.bbu = *bbu;
      pair.first_seen_s = p.at("first_seen").get<double>();
      pair.last_seen_s = p.at("last_seen").get<double>();
      pair.packet_count = p.at("packet_count").get<std::uint64_t>();
      pair.acknowledged = p.at("acknowledged").get<bool>();
      pair.last_event_s = p.value("last_event", pair.last_seen_s);
      pairs[key_of(pair.rrh, pair.bbu)] = pair;
    }
    unmatched_ = doc.at("unmatched_punts").get<std::uint64_t>();
    total_ = doc.at("total_punts").get<std::uint64_t>();
  } catch (const json::exception& e) {
    return Error{Errc::kInvalidArgument, std::string("bad alert snapshot: ") + e.what()};
  }
  pairs_ = std::move(pairs);
  return ok_status();
}

}  // namespace fhctl
