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

#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

namespace fhctl {

// Every failure the library reports. Names follow the wire spelling used in
// REST error bodies and state dumps (see errc_name).
enum class Errc {
  kMalformedMac,
  kMalformedVlan,
  kMalformedDeviceId,
  kMalformedHostId,
  kMalformedIp,
  kInvalidArgument,
  kInvalidScenario,
  kUnknownAttachment,
  kDuplicateMac,
  kUnknownDevice,
  kUnknownPort,
  kUnknownLink,
  kUnsupportedMatch,
  kInvalidRule,
  kUnknownRule,
  kBadQueue,
  kNoCommonType,
  kNoPath,
  kCapacityExceeded,
  kUnknownHost,
  kHostInUse,
  kUnknownIntent,
  kInvalidState,
  kInvalidHeader,
  kTruncated,
  kBadVersion,
  kBadPt,
  kLengthMismatch,
  kUnknownTeid,
  kDuplicateTeid,
  kUnknownPortal,
  kNoBbuSwitch,
  kUnknownUser,
  kUnknownService,
  kIo,
};

std::string_view errc_name(Errc code);

struct Error {
  Errc code;
  std::string message;

  Error(Errc c, std::string msg = {}) : code(c), message(std::move(msg)) {}

  std::string to_string() const;
};

// Either a value or an Error. Kept deliberately small; the library has no
// exceptions on its hot paths.
template <class T>
class [[nodiscard]] Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(Error error) : data_(std::move(error)) {}

  bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<0>(data_); }
  const T& value() const& { return std::get<0>(data_); }
  T&& value() && { return std::get<0>(std::move(data_)); }

  const Error& error() const { return std::get<1>(data_); }

  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }
  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }

 private:
  std::variant<T, Error> data_;
};

class [[nodiscard]] Status {
 public:
  Status() = default;
  Status(Error error) : error_(std::move(error)), ok_(false) {}

  bool ok() const { return ok_; }
  explicit operator bool() const { return ok_; }
  const Error& error() const { return error_; }

 private:
  Error error_{Errc::kInvalidArgument};
  bool ok_ = true;
};

inline Status ok_status() { return {}; }

}  // namespace fhctl
