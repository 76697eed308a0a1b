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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fhctl/ids.hpp"

namespace fhctl::gtpu {

inline constexpr std::uint16_t kUdpPort = 2152;
inline constexpr std::uint8_t kGpdu = 0xFF;
inline constexpr std::size_t kMandatoryHeaderSize = 8;
inline constexpr std::size_t kOptionalBlockSize = 4;

/// GTPv1-U header. `sequence`, `npdu` and `next_ext_type` are carried on the
/// wire only when at least one of the E, S, PN flags is set; otherwise they
/// must be zero.
struct Header {
  std::uint8_t version = 1;
  bool pt = true;
  bool e_flag = false;
  bool s_flag = false;
  bool pn_flag = false;
  std::uint8_t message_type = kGpdu;
  /// Bytes after the mandatory 8. Computed by encode; filled in by decode.
  std::uint16_t length = 0;
  std::uint32_t teid = 0;
  std::uint16_t sequence = 0;
  std::uint8_t npdu = 0;
  std::uint8_t next_ext_type = 0;

  bool has_optional_block() const { return e_flag || s_flag || pn_flag; }
  bool operator==(const Header&) const = default;
};

struct Decoded {
  Header header;
  std::vector<std::uint8_t> payload;
};

/// Errors: INVALID_HEADER (version != 1, pt != 1, optional fields without a
/// flag, an extension chain, or a payload too large for the length field).
Result<std::vector<std::uint8_t>> encode(const Header& header, std::span<const std::uint8_t> payload);

/// Errors: TRUNCATED, BAD_VERSION, BAD_PT, LENGTH_MISMATCH. Extension headers
/// are walked and skipped; their contents are not returned.
Result<Decoded> decode(std::span<const std::uint8_t> bytes);

/// TEID of a G-PDU, if `bytes` decodes; cheaper than decode (no payload copy).
std::optional<std::uint32_t> peek_teid(std::span<const std::uint8_t> bytes);

enum class SessionState { kActive, kDiverted, kBlocked };

std::string_view to_string(SessionState state);

struct UserSession {
  std::uint32_t teid = 0;
  std::string user_id;
  SessionState state = SessionState::kActive;
  std::set<std::string> hired_services;
  /// Billing tokens as handed in by the portal, by service. Never inspected.
  std::map<std::string, std::string> billing;
  /// Endpoints the user's traffic flows between.
  std::optional<HostId> rrh;
  std::optional<HostId> bbu;

  bool operator==(const UserSession&) const = default;
};

/// TEID-keyed session table. TEID 0 is reserved and never assigned.
class SessionTable {
 public:
  Status add(UserSession session);
  Status remove(std::uint32_t teid);
  /// Smallest TEID >= 1 not in use.
  std::uint32_t next_free_teid() const;

  UserSession* find(std::uint32_t teid);
  const UserSession* find(std::uint32_t teid) const;
  std::vector<UserSession*> find_user(const std::string& user_id);

  const std::map<std::uint32_t, UserSession>& sessions() const { return sessions_; }

 private:
  std::map<std::uint32_t, UserSession> sessions_;
};

struct UnknownTeid {
  std::uint32_t teid;
};
struct NotGtpu {};

using Classification = std::variant<const UserSession*, UnknownTeid, NotGtpu>;

/// NOT_GTPU unless the UDP destination is 2152 and the payload decodes as a
/// GTP-U header; otherwise the session owning the TEID, or UNKNOWN_TEID.
Classification classify(std::uint16_t udp_dst, std::span<const std::uint8_t> udp_payload, const SessionTable& sessions);

}  // namespace fhctl::gtpu
