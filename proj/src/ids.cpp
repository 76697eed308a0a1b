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

#include "fhctl/ids.hpp"

#include <charconv>
#include <cstdio>

namespace fhctl {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool parse_decimal(std::string_view text, long& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Result<DeviceId> DeviceId::parse(std::string_view text) {
  constexpr std::string_view kPrefix = "of:";
  if (text.size() != kPrefix.size() + 16 || text.substr(0, 3) != kPrefix) {
    return Error{Errc::kMalformedDeviceId, "device id must be of: followed by 16 hex digits: " + std::string(text)};
  }
  std::uint64_t value = 0;
  for (char c : text.substr(3)) {
    // Canonical form is lowercase only.
    if (c >= 'A' && c <= 'F') {
      return Error{Errc::kMalformedDeviceId, "device id must be lowercase: " + std::string(text)};
    }
    int v = hex_value(c);
    if (v < 0) return Error{Errc::kMalformedDeviceId, "bad hex digit in device id: " + std::string(text)};
    value = (value << 4) | static_cast<std::uint64_t>(v);
  }
  return DeviceId{value};
}

DeviceId DeviceId::from_dpid(std::uint64_t dpid) { return DeviceId{dpid}; }

std::string DeviceId::to_string() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "of:%016llx", static_cast<unsigned long long>(dpid_));
  return buf;
}

Result<MacAddress> MacAddress::parse(std::string_view text) {
  if (text.size() != 17) return Error{Errc::kMalformedMac, "mac must be six hex pairs: " + std::string(text)};
  std::array<std::uint8_t, 6> octets{};
  for (std::size_t i = 0; i < 6; ++i) {
    const std::size_t at = i * 3;
    int hi = hex_value(text[at]);
    int lo = hex_value(text[at + 1]);
    if (hi < 0 || lo < 0 || (i < 5 && text[at + 2] != ':')) {
      return Error{Errc::kMalformedMac, "mac must be six hex pairs: " + std::string(text)};
    }
    octets[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return MacAddress{octets};
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets_[0], octets_[1], octets_[2], octets_[3],
                octets_[4], octets_[5]);
  return buf;
}

Result<VlanRef> VlanRef::from_int(long tag) {
  if (tag < kUntagged || tag > 4094) {
    return Error{Errc::kMalformedVlan, "vlan must be -1 or within 0..4094: " + std::to_string(tag)};
  }
  return VlanRef{static_cast<int>(tag)};
}

Result<VlanRef> VlanRef::parse(std::string_view text) {
  if (text == "None") return VlanRef{};
  long tag = 0;
  if (!parse_decimal(text, tag)) return Error{Errc::kMalformedVlan, "vlan must be None or an integer: " + std::string(text)};
  return from_int(tag);
}

std::string VlanRef::to_string() const { return tagged() ? std::to_string(tag_) : "None"; }

Result<HostId> HostId::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Error{Errc::kMalformedHostId, "host id must be <mac>/<vlan>: " + std::string(text)};
  }
  auto mac = MacAddress::parse(text.substr(0, slash));
  if (!mac) return mac.error();
  auto vlan = VlanRef::parse(text.substr(slash + 1));
  if (!vlan) return vlan.error();
  return HostId{*mac, *vlan};
}

std::string HostId::to_string() const { return mac.to_string() + "/" + vlan.to_string(); }

Result<Ipv4Address> Ipv4Address::parse(std::string_view text) {
  std::uint32_t value = 0;
  int parts = 0;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = text.find('.', pos);
    const auto piece = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    long octet = 0;
    if (++parts > 4 || piece.empty() || piece.size() > 3 || !parse_decimal(piece, octet) || octet < 0 || octet > 255) {
      return Error{Errc::kMalformedIp, "not an IPv4 address: " + std::string(text)};
    }
    value = (value << 8) | static_cast<std::uint32_t>(octet);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  if (parts != 4) return Error{Errc::kMalformedIp, "not an IPv4 address: " + std::string(text)};
  return Ipv4Address{value};
}

std::string Ipv4Address::to_string() const {
  return std::to_string(value_ >> 24) + "." + std::to_string((value_ >> 16) & 0xff) + "." +
         std::to_string((value_ >> 8) & 0xff) + "." + std::to_string(value_ & 0xff);
}

}  // namespace fhctl
