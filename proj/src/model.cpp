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

#include "fhctl/model.hpp"

#include <array>
#include <utility>

namespace fhctl {
namespace {

template <class E, std::size_t N>
Result<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text, Errc err,
                 std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  return Error{err, "unknown " + std::string(what) + ": " + std::string(text)};
}

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<HostRole, std::string_view>, 2> kRoles{{
    {HostRole::kRrh, "RRH"},
    {HostRole::kBbu, "BBU"},
}};

constexpr std::array<std::pair<IntentState, std::string_view>, 5> kStates{{
    {IntentState::kPendingAdd, "PENDING_ADD"},
    {IntentState::kInstalled, "INSTALLED"},
    {IntentState::kPendingRemove, "PENDING_REMOVE"},
    {IntentState::kWithdrawn, "WITHDRAWN"},
    {IntentState::kFailed, "FAILED"},
}};

constexpr std::array<std::pair<FailureReason, std::string_view>, 4> kReasons{{
    {FailureReason::kBadQueue, "BAD_QUEUE"},
    {FailureReason::kNoPath, "NO_PATH"},
    {FailureReason::kUnknownHost, "UNKNOWN_HOST"},
    {FailureReason::kCapacityExceeded, "CAPACITY_EXCEEDED"},
}};

constexpr std::array<std::pair<QueueType, std::string_view>, 3> kQueueTypes{{
    {QueueType::kLinuxHtb, "LINUX_HTB"},
    {QueueType::kProntoStrict, "PRONTO_STRICT"},
    {QueueType::kProntoWeightedRoundRobin, "PRONTO_WEIGHTED_ROUND_ROBIN"},
}};

}  // namespace

std::string_view to_string(HostRole role) { return name_of(kRoles, role); }
Result<HostRole> parse_host_role(std::string_view text) {
  return lookup(kRoles, text, Errc::kInvalidArgument, "host type");
}

std::string_view to_string(IntentState state) { return name_of(kStates, state); }
std::string_view to_string(FailureReason reason) { return name_of(kReasons, reason); }
Result<IntentState> parse_intent_state(std::string_view text) {
  return lookup(kStates, text, Errc::kInvalidArgument, "intent state");
}
Result<FailureReason> parse_failure_reason(std::string_view text) {
  return lookup(kReasons, text, Errc::kInvalidArgument, "failure reason");
}

std::string_view to_string(QueueType type) { return name_of(kQueueTypes, type); }
Result<QueueType> parse_queue_type(std::string_view text) {
  return lookup(kQueueTypes, text, Errc::kInvalidArgument, "queue type");
}

}  // namespace fhctl
