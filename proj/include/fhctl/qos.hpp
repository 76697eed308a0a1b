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

#include <map>
#include <string>
#include <vector>

#include "fhctl/topology.hpp"
#include "json.hpp"

namespace fhctl {

/// Queue-type preference orders: one per switch-profile name, plus a default
/// used for profiles without an entry.
struct NegotiationTable {
  std::vector<QueueType> default_order{QueueType::kLinuxHtb, QueueType::kProntoStrict,
                                       QueueType::kProntoWeightedRoundRobin};
  std::map<std::string, std::vector<QueueType>> per_profile;

  const std::vector<QueueType>& order_for(const std::string& profile_name) const;
  /// Non-empty orders without duplicates.
  Status validate() const;
};

/// First type of the applicable order that `profile` supports.
/// Errors: NO_COMMON_TYPE.
Result<QueueType> select_queue_type(const SwitchProfile& profile, const NegotiationTable& table);

/// What the controller asks switches for. In strict mode negotiation is off
/// and every request is LINUX_HTB, whatever the switch supports.
class QosNegotiator {
 public:
  QosNegotiator() = default;
  explicit QosNegotiator(NegotiationTable table) : table_(std::move(table)) {}

  void strict_negotiation_mode(bool on) { strict_ = on; }
  bool strict() const { return strict_; }

  const NegotiationTable& table() const { return table_; }
  Status set_table(NegotiationTable table);

  Result<QueueType> request_type(const SwitchProfile& profile) const;

 private:
  NegotiationTable table_;
  bool strict_ = false;
};

/// `{"strict": bool, "default": [...], "profiles": {name: [...]}}`.
Result<NegotiationTable> parse_negotiation_table(const nlohmann::json& doc);
nlohmann::json negotiation_document(const QosNegotiator& negotiator);

}  // namespace fhctl
