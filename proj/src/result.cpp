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

#include "fhctl/result.hpp"

namespace fhctl {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedMac: return "MALFORMED_MAC";
    case Errc::kMalformedVlan: return "MALFORMED_VLAN";
    case Errc::kMalformedDeviceId: return "MALFORMED_DEVICE_ID";
    case Errc::kMalformedHostId: return "MALFORMED_HOST_ID";
    case Errc::kMalformedIp: return "MALFORMED_IP";
    case Errc::kInvalidArgument: return "INVALID_ARGUMENT";
    case Errc::kInvalidScenario: return "INVALID_SCENARIO";
    case Errc::kUnknownAttachment: return "UNKNOWN_ATTACHMENT";
    case Errc::kDuplicateMac: return "DUPLICATE_MAC";
    case Errc::kUnknownDevice: return "UNKNOWN_DEVICE";
    case Errc::kUnknownPort: return "UNKNOWN_PORT";
    case Errc::kUnknownLink: return "UNKNOWN_LINK";
    case Errc::kUnsupportedMatch: return "UNSUPPORTED_MATCH";
    case Errc::kInvalidRule: return "INVALID_RULE";
    case Errc::kUnknownRule: return "UNKNOWN_RULE";
    case Errc::kBadQueue: return "BAD_QUEUE";
    case Errc::kNoCommonType: return "NO_COMMON_TYPE";
    case Errc::kNoPath: return "NO_PATH";
    case Errc::kCapacityExceeded: return "CAPACITY_EXCEEDED";
    case Errc::kUnknownHost: return "UNKNOWN_HOST";
    case Errc::kHostInUse: return "HOST_IN_USE";
    case Errc::kUnknownIntent: return "UNKNOWN_INTENT";
    case Errc::kInvalidState: return "INVALID_STATE";
    case Errc::kInvalidHeader: return "INVALID_HEADER";
    case Errc::kTruncated: return "TRUNCATED";
    case Errc::kBadVersion: return "BAD_VERSION";
    case Errc::kBadPt: return "BAD_PT";
    case Errc::kLengthMismatch: return "LENGTH_MISMATCH";
    case Errc::kUnknownTeid: return "UNKNOWN_TEID";
    case Errc::kDuplicateTeid: return "DUPLICATE_TEID";
    case Errc::kUnknownPortal: return "UNKNOWN_PORTAL";
    case Errc::kNoBbuSwitch: return "NO_BBU_SWITCH";
    case Errc::kUnknownUser: return "UNKNOWN_USER";
    case Errc::kUnknownService: return "UNKNOWN_SERVICE";
    case Errc::kIo: return "IO_ERROR";
  }
  return "UNKNOWN";
}

std::string Error::to_string() const {
  std::string out(errc_name(code));
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace fhctl
