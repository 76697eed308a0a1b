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

#include <gtest/gtest.h>

#include "fhctl/gtpu.hpp"
#include "gtpu_oracle.hpp"

using namespace fhctl;
using namespace fhctl::gtpu;

namespace {
std::vector<std::uint8_t> bytes(std::initializer_list<int> v) {
  std::vector<std::uint8_t> out;
  for (int b : v) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}
}  // namespace

// Hand-computed: flags 0x30 (v1, PT), G-PDU, length 0, TEID 1.
TEST(GtpuVectors, MinimalHeader) {
  Header h;
  h.teid = 1;
  auto enc = encode(h, {});
  ASSERT_TRUE(enc.ok());
  EXPECT_EQ(*enc, bytes({0x30, 0xFF, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01}));
  auto dec = decode(*enc);
  ASSERT_TRUE(dec.ok());
  EXPECT_EQ(dec->header, h);
  EXPECT_TRUE(dec->payload.empty());
}

// Hand-computed: S flag adds the 4-byte block (seq 5, N-PDU 0, next 0).
TEST(GtpuVectors, SequenceNumber) {
  Header h;
  h.teid = 1;
  h.s_flag = true;
  h.sequence = 5;
  auto enc = encode(h, {});
  ASSERT_TRUE(enc.ok());
  EXPECT_EQ(*enc, bytes({0x32, 0xFF, 0x00, 0x04, 0x00, 0x00, 0x00, 0x01, 0x00, 0x05, 0x00, 0x00}));
  auto dec = decode(*enc);
  ASSERT_TRUE(dec.ok());
  EXPECT_EQ(dec->header.sequence, 5);
  EXPECT_EQ(dec->header.length, 4);
}

TEST(GtpuDecode, Errors) {
  EXPECT_EQ(decode(bytes({0x30, 0xFF, 0, 0, 0, 0, 0})).error().code, Errc::kTruncated);
  EXPECT_EQ(decode(bytes({0x50, 0xFF, 0, 0, 0, 0, 0, 1})).error().code, Errc::kBadVersion);
  EXPECT_EQ(decode(bytes({0x20, 0xFF, 0, 0, 0, 0, 0, 1})).error().code, Errc::kBadPt);
  EXPECT_EQ(decode(bytes({0x30, 0xFF, 0, 2, 0, 0, 0, 1, 9})).error().code, Errc::kTruncated);
  EXPECT_EQ(decode(bytes({0x30, 0xFF, 0, 0, 0, 0, 0, 1, 9})).error().code, Errc::kLengthMismatch);
  // E flag with a next-extension type whose header runs past the end.
  EXPECT_EQ(decode(bytes({0x34, 0xFF, 0, 5, 0, 0, 0, 1, 0, 0, 0, 0x85, 2})).error().code, Errc::kLengthMismatch);
}

TEST(GtpuDecode, SkipsExtensionHeaders) {
  // E flag, next type 0x85, one 4-byte extension ending in next type 0.
  auto pkt = bytes({0x34, 0xFF, 0, 10, 0, 0, 0, 7, 0, 0, 0, 0x85, 1, 0xAA, 0xBB, 0x00, 0xDE, 0xAD});
  auto dec = decode(pkt);
  ASSERT_TRUE(dec.ok());
  EXPECT_EQ(dec->header.teid, 7u);
  EXPECT_EQ(dec->payload, bytes({0xDE, 0xAD}));
}

TEST(GtpuEncode, RejectsInvalidHeaders) {
  Header h;
  h.sequence = 1;  // without a flag
  EXPECT_EQ(encode(h, {}).error().code, Errc::kInvalidHeader);
  Header v;
  v.version = 2;
  EXPECT_EQ(encode(v, {}).error().code, Errc::kInvalidHeader);
  Header ext;
  ext.e_flag = true;
  ext.next_ext_type = 0x85;
  EXPECT_EQ(encode(ext, {}).error().code, Errc::kInvalidHeader);
  std::vector<std::uint8_t> huge(0x10000);
  EXPECT_EQ(encode(Header{}, huge).error().code, Errc::kInvalidHeader);
}

TEST(GtpuPeek, OnlyGpdus) {
  Header h;
  h.teid = 42;
  auto pkt = *encode(h, bytes({1, 2, 3}));
  EXPECT_EQ(peek_teid(pkt), 42u);
  h.message_type = 1;  // echo request
  EXPECT_FALSE(peek_teid(*encode(h, {})).has_value());
}

// Property: decode(encode(h, p)) == (h, p) with the computed length.
TEST(GtpuProperty, RoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20000; ++i) {
    Header h = test::random_header(rng);
    auto payload = test::random_bytes(rng, 256);
    auto enc = encode(h, payload);
    ASSERT_TRUE(enc.ok());
    auto dec = decode(*enc);
    ASSERT_TRUE(dec.ok()) << dec.error().to_string();
    h.length = static_cast<std::uint16_t>(payload.size() + (h.has_optional_block() ? 4 : 0));
    EXPECT_EQ(dec->header, h);
    EXPECT_EQ(dec->payload, payload);
  }
}

// Property: on arbitrary input the codec accepts exactly what the reference
// validator accepts, with the same fields.
TEST(GtpuProperty, FuzzAgreesWithOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100000; ++i) {
    auto input = test::fuzz_input(rng);
    ASSERT_TRUE(test::codec_agrees_with_oracle(input)) << "case " << i;
  }
}

TEST(SessionTable, TeidAssignment) {
  SessionTable t;
  EXPECT_EQ(t.next_free_teid(), 1u);
  ASSERT_TRUE(t.add({1, "a"}).ok());
  ASSERT_TRUE(t.add({3, "b"}).ok());
  EXPECT_EQ(t.next_free_teid(), 2u);
  EXPECT_EQ(t.add({3, "c"}).error().code, Errc::kDuplicateTeid);
  EXPECT_EQ(t.add({0, "d"}).error().code, Errc::kInvalidArgument);
  EXPECT_EQ(t.remove(9).error().code, Errc::kUnknownTeid);
}

TEST(Classify, SessionUnknownNotGtpu) {
  SessionTable t;
  ASSERT_TRUE(t.add({7, "alice"}).ok());
  Header h;
  h.teid = 7;
  auto pkt = *encode(h, {});
  EXPECT_TRUE(std::holds_alternative<const UserSession*>(classify(kUdpPort, pkt, t)));
  h.teid = 8;
  auto other = *encode(h, {});
  ASSERT_TRUE(std::holds_alternative<UnknownTeid>(classify(kUdpPort, other, t)));
  EXPECT_EQ(std::get<UnknownTeid>(classify(kUdpPort, other, t)).teid, 8u);
  EXPECT_TRUE(std::holds_alternative<NotGtpu>(classify(5001, pkt, t)));
  EXPECT_TRUE(std::holds_alternative<NotGtpu>(classify(kUdpPort, bytes({1, 2, 3}), t)));
}
