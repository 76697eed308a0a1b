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

#include "fhctl/qos.hpp"

#include <set>

namespace fhctl {

using nlohmann::json;

const std::vector<QueueType>& NegotiationTable::order_for(const std::string& profile_name) const {
  auto it = per_profile.find(profile_name);
  return it == per_profile.end() ? default_order : it->second;
}

Status NegotiationTable::validate() const {
  auto check = [](const std::vector<QueueType>& order, const std::string& what) -> Status {
    if (order.empty()) return Error{Errc::kInvalidArgument, "empty negotiation order for " + what};
    std::set<QueueType> seen(order.begin(), order.end());
    if (seen.size() != order.size()) return Error{Errc::kInvalidArgument, "duplicate queue type in order for " + what};
    return ok_status();
  };
  if (auto st = check(default_order, "default"); !st) return st;
  for (const auto& [name, order] : per_profile) {
    if (auto st = check(order, name); !st) return st;
  }
  return ok_status();
}

Result<QueueType> select_queue_type(const SwitchProfile& profile, const NegotiationTable& table) {
  for (QueueType type : table.order_for(profile.name)) {
    if (profile.supports(type)) return type;
  }
  return Error{Errc::kNoCommonType, "profile " + profile.name + " supports none of the negotiated queue types"};
}

Status QosNegotiator::set_table(NegotiationTable table) {
  if (auto st = table.validate(); !st) return st;
  table_ = std::move(table);
  return ok_status();
}

Result<QueueType> QosNegotiator::request_type(const SwitchProfile& profile) const {
  if (strict_) return QueueType::kLinuxHtb;
  return select_queue_type(profile, table_);
}

Result<NegotiationTable> parse_negotiation_table(const json& doc) {
  auto parse_order = [](const json& arr) -> Result<std::vector<QueueType>> {
    if (!arr.is_array()) return Error{Errc::kInvalidArgument, "negotiation order must be an array"};
    std::vector<QueueType> out;
    for (const auto& t : arr) {
      if (!t.is_string()) return Error{Errc::kInvalidArgument, "queue type must be a string"};
      auto qt = parse_queue_type(t.get<std::string>());
      if (!qt) return qt.error();
      out.push_back(*qt);
    }
    return out;
  };
  NegotiationTable table;
  if (!doc.is_object()) return Error{Errc::kInvalidArgument, "negotiation section must be an object"};
  if (doc.contains("default")) {
    auto order = parse_order(doc.at("default"));
    if (!order) return order.error();
    table.default_order = *order;
  }
  if (doc.contains("profiles")) {
    for (const auto& [name, arr] : doc.at("profiles").items()) {
      auto order = parse_order(arr);
      if (!order) return order.error();
      table.per_profile[name] = *order;
    }
  }
  if (auto st = table.validate(); !st) return st.error();
  return table;
}

json negotiation_document(const QosNegotiator& negotiator) {
  auto names = [](const std::vector<QueueType>& order) {
    json arr = json::array();
    for (auto t : order) arr.push_back(std::string(to_string(t)));
    return arr;
  };
  json profiles = json::object();
  for (const auto& [name, order] : negotiator.table().per_profile) profiles[name] = names(order);
  return json{{"strict", negotiator.strict()}, {"default", names(negotiator.table().default_order)}, {"profiles", profiles}};
}

}  // namespace fhctl
