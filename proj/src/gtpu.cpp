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

#include "fhctl/gtpu.hpp"

namespace fhctl::gtpu {
namespace {

constexpr std::uint8_t kPtBit = 0x10;
constexpr std::uint8_t kReservedBit = 0x08;
constexpr std::uint8_t kEBit = 0x04;
constexpr std::uint8_t kSBit = 0x02;
constexpr std::uint8_t kPnBit = 0x01;

std::uint16_t load16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t load32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

struct Layout {
  Header header;
  std::size_t payload_offset = 0;
};

// Shared by decode and peek_teid. Every index is checked against `bytes`.
Result<Layout> parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMandatoryHeaderSize) return Error{Errc::kTruncated, "shorter than the 8-byte header"};
  Layout out;
  Header& h = out.header;
  const std::uint8_t flags = bytes[0];
  h.version = flags >> 5;
  if (h.version != 1) return Error{Errc::kBadVersion, "version " + std::to_string(h.version)};
  h.pt = (flags & kPtBit) != 0;
  if (!h.pt) return Error{Errc::kBadPt, "protocol type is GTP'"};
  if (flags & kReservedBit) return Error{Errc::kInvalidHeader, "reserved bit set"};
  h.e_flag = (flags & kEBit) != 0;
  h.s_flag = (flags & kSBit) != 0;
  h.pn_flag = (flags & kPnBit) != 0;
  h.message_type = bytes[1];
  h.length = load16(bytes, 2);
  h.teid = load32(bytes, 4);

  const std::size_t available = bytes.size() - kMandatoryHeaderSize;
  if (available < h.length) {
    return Error{Errc::kTruncated,
                 "declared length " + std::to_string(h.length) + " with " + std::to_string(available) + " bytes"};
  }
  if (available > h.length) {
    return Error{Errc::kLengthMismatch,
                 "declared length " + std::to_string(h.length) + " with " + std::to_string(available) + " bytes"};
  }
  const std::size_t end = bytes.size();
  std::size_t offset = kMandatoryHeaderSize;
  if (h.has_optional_block()) {
    if (h.length < kOptionalBlockSize) return Error{Errc::kLengthMismatch, "optional block not covered by length"};
    h.sequence = load16(bytes, 8);
    h.npdu = bytes[10];
    h.next_ext_type = bytes[11];
    offset += kOptionalBlockSize;
    if (h.e_flag) {
      // Each extension: length byte in 4-octet units, content, next type.
      std::uint8_t next = h.next_ext_type;
      while (next != 0) {
        if (offset >= end) return Error{Errc::kLengthMismatch, "extension header past declared length"};
        const std::size_t units = bytes[offset];
        if (units == 0) return Error{Errc::kLengthMismatch, "zero-length extension header"};
        const std::size_t size = units * 4;
        if (size > end - offset) return Error{Errc::kLengthMismatch, "extension header past declared length"};
        next = bytes[offset + size - 1];
        offset += size;
      }
    }
  }
  out.payload_offset = offset;
  return out;
}

}  // namespace

Result<std::vector<std::uint8_t>> encode(const Header& header, std::span<const std::uint8_t> payload) {
  if (header.version != 1) return Error{Errc::kInvalidHeader, "version must be 1"};
  if (!header.pt) return Error{Errc::kInvalidHeader, "pt must be 1 for GTP-U"};
  const bool block = header.has_optional_block();
  if (!block && (header.sequence != 0 || header.npdu != 0 || header.next_ext_type != 0)) {
    return Error{Errc::kInvalidHeader, "optional fields set without E, S or PN flag"};
  }
  if (header.e_flag && header.next_ext_type != 0) {
    return Error{Errc::kInvalidHeader, "encoding extension headers is not supported"};
  }
  const std::size_t length = payload.size() + (block ? kOptionalBlockSize : 0);
  if (length > 0xFFFF) return Error{Errc::kInvalidHeader, "payload too large for the length field"};

  std::vector<std::uint8_t> out;
  out.reserve(kMandatoryHeaderSize + length);
  std::uint8_t flags = static_cast<std::uint8_t>(header.version << 5) | kPtBit;
  if (header.e_flag) flags |= kEBit;
  if (header.s_flag) flags |= kSBit;
  if (header.pn_flag) flags |= kPnBit;
  out.push_back(flags);
  out.push_back(header.message_type);
  out.push_back(static_cast<std::uint8_t>(length >> 8));
  out.push_back(static_cast<std::uint8_t>(length));
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(header.teid >> shift));
  if (block) {
    out.push_back(static_cast<std::uint8_t>(header.sequence >> 8));
    out.push_back(static_cast<std::uint8_t>(header.sequence));
    out.push_back(header.npdu);
    out.push_back(header.next_ext_type);
  }
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Result<Decoded> decode(std::span<const std::uint8_t> bytes) {
  auto layout = parse(bytes);
  if (!layout) return layout.error();
  Decoded out;
  out.header = layout->header;
  auto rest = bytes.subspan(layout->payload_offset);
  out.payload.assign(rest.begin(), rest.end());
  return out;
}

std::optional<std::uint32_t> peek_teid(std::span<const std::uint8_t> bytes) {
  auto layout = parse(bytes);
  if (!layout || layout->header.message_type != kGpdu) return std::nullopt;
  return layout->header.teid;
}

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::kActive: return "ACTIVE";
    case SessionState::kDiverted: return "DIVERTED";
    case SessionState::kBlocked: return "BLOCKED";
  }
  return "?";
}

Status SessionTable::add(UserSession session) {
  if (session.teid == 0) return Error{Errc::kInvalidArgument, "teid 0 is reserved"};
  if (session.user_id.empty()) return Error{Errc::kInvalidArgument, "session needs a user id"};
  if (sessions_.count(session.teid)) {
    return Error{Errc::kDuplicateTeid, "teid " + std::to_string(session.teid) + " already has a session"};
  }
  const auto teid = session.teid;
  sessions_.emplace(teid, std::move(session));
  return ok_status();
}

Status SessionTable::remove(std::uint32_t teid) {
  if (!sessions_.erase(teid)) return Error{Errc::kUnknownTeid, "no session for teid " + std::to_string(teid)};
  return ok_status();
}

std::uint32_t SessionTable::next_free_teid() const {
  std::uint32_t teid = 1;
  for (const auto& [used, s] : sessions_) {
    if (used != teid) break;
    ++teid;
  }
  return teid;
}

UserSession* SessionTable::find(std::uint32_t teid) {
  auto it = sessions_.find(teid);
  return it == sessions_.end() ? nullptr : &it->second;
}

const UserSession* SessionTable::find(std::uint32_t teid) const {
  auto it = sessions_.find(teid);
  return it == sessions_.end() ? nullptr : &it->second;
}

std::vector<UserSession*> SessionTable::find_user(const std::string& user_id) {
  std::vector<UserSession*> out;
  for (auto& [teid, s] : sessions_) {
    if (s.user_id == user_id) out.push_back(&s);
  }
  return out;
}

Classification classify(std::uint16_t udp_dst, std::span<const std::uint8_t> udp_payload,
                        const SessionTable& sessions) {
  if (udp_dst != kUdpPort) return NotGtpu{};
  auto layout = parse(udp_payload);
  if (!layout) return NotGtpu{};
  const std::uint32_t teid = layout->header.teid;
  if (const UserSession* s = sessions.find(teid)) return s;
  return UnknownTeid{teid};
}

}  // namespace fhctl::gtpu
