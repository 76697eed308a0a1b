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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "fhctl/result.hpp"

namespace fhctl {

/// OpenFlow datapath id in its canonical textual form `of:` + 16 lowercase hex
/// digits. Ordering is lexicographic on that form, which is also numeric.
class DeviceId {
 public:
  DeviceId() = default;

  static Result<DeviceId> parse(std::string_view text);
  static DeviceId from_dpid(std::uint64_t dpid);

  std::uint64_t dpid() const { return dpid_; }
  std::string to_string() const;

  auto operator<=>(const DeviceId&) const = default;

 private:
  explicit DeviceId(std::uint64_t dpid) : dpid_(dpid) {}
  std::uint64_t dpid_ = 0;
};

class MacAddress {
 public:
  MacAddress() = default;
  explicit MacAddress(std::array<std::uint8_t, 6> octets) : octets_(octets) {}

  /// Accepts upper or lower case hex; always formats lowercase.
  static Result<MacAddress> parse(std::string_view text);

  const std::array<std::uint8_t, 6>& octets() const { return octets_; }
  std::string to_string() const;

  auto operator<=>(const MacAddress&) const = default;

 private:
  std::array<std::uint8_t, 6> octets_{};
};

/// 802.1Q tag or untagged. Untagged has two spellings on the wire, `-1` and
/// `None`; both parse to the same value and format as `None`.
class VlanRef {
 public:
  static constexpr int kUntagged = -1;

  VlanRef() = default;
  static Result<VlanRef> from_int(long tag);
  static Result<VlanRef> parse(std::string_view text);
  static VlanRef untagged() { return VlanRef{}; }

  bool tagged() const { return tag_ != kUntagged; }
  int tag() const { return tag_; }
  std::string to_string() const;

  auto operator<=>(const VlanRef&) const = default;

 private:
  explicit VlanRef(int tag) : tag_(tag) {}
  int tag_ = kUntagged;
};

struct HostId {
  MacAddress mac;
  VlanRef vlan;

  /// `<mac>/<vlan>`, e.g. `00:00:00:00:01:01/None`.
  static Result<HostId> parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const HostId&) const = default;
};

class Ipv4Address {
 public:
  Ipv4Address() = default;
  explicit Ipv4Address(std::uint32_t value) : value_(value) {}

  static Result<Ipv4Address> parse(std::string_view text);

  std::uint32_t value() const { return value_; }
  std::string to_string() const;

  auto operator<=>(const Ipv4Address&) const = default;

 private:
  std::uint32_t value_ = 0;
};

}  // namespace fhctl

template <>
struct std::hash<fhctl::DeviceId> {
  std::size_t operator()(const fhctl::DeviceId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.dpid());
  }
};
