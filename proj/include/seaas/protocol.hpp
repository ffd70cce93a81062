// Copyright 2026 The SeaaS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Offload wire protocol.
//
// Every message travels in a frame: a 32-bit big-endian body length followed
// by that many bytes of UTF-8 JSON. Bodies carry a type tag "t" and, on
// everything but hello, the session id "sid".
//
//   hello          device -> cloud   {"t","device"}
//   hello_ack      cloud -> device   {"t","sid","version","policy","last_seq"}
//   events         device -> cloud   {"t","sid","events"}
//   decisions      cloud -> device   {"t","sid","decisions"}
//   policy_update  cloud -> device   {"t","sid","version","policy"}
//   policy_ack     device -> cloud   {"t","sid","version"}
//   hb / hb_ack    both              {"t","sid"}
//   bye            device -> cloud   {"t","sid"}
//   err            cloud -> device   {"t","sid"?,"code","detail"}

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "seaas/policy.hpp"
#include "seaas/resource.hpp"

namespace seaas::protocol {

inline constexpr std::size_t kMaxFrameBody = 1'048'576;
inline constexpr std::uint16_t kDefaultPort = 7740;
inline constexpr std::int64_t kHeartbeatIntervalMs = 5'000;
inline constexpr std::int64_t kHeartbeatTimeoutMs = 15'000;

struct Hello {
  DeviceDescriptor device;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct HelloAck {
  std::string sid;
  std::uint64_t version = 0;
  PolicySet policy;
  std::uint64_t last_seq = 0;
  friend bool operator==(const HelloAck&, const HelloAck&) = default;
};

struct Events {
  std::string sid;
  std::vector<AccessEvent> events;
  friend bool operator==(const Events&, const Events&) = default;
};

struct Decisions {
  std::string sid;
  std::vector<Decision> decisions;
  friend bool operator==(const Decisions&, const Decisions&) = default;
};

struct PolicyUpdate {
  std::string sid;
  std::uint64_t version = 0;
  PolicySet policy;
  friend bool operator==(const PolicyUpdate&, const PolicyUpdate&) = default;
};

struct PolicyAck {
  std::string sid;
  std::uint64_t version = 0;
  friend bool operator==(const PolicyAck&, const PolicyAck&) = default;
};

struct Heartbeat {
  std::string sid;
  friend bool operator==(const Heartbeat&, const Heartbeat&) = default;
};

struct HeartbeatAck {
  std::string sid;
  friend bool operator==(const HeartbeatAck&, const HeartbeatAck&) = default;
};

struct Bye {
  std::string sid;
  friend bool operator==(const Bye&, const Bye&) = default;
};

struct Err {
  std::optional<std::string> sid;
  std::string code;
  std::string detail;
  friend bool operator==(const Err&, const Err&) = default;
};

using Message = std::variant<Hello, HelloAck, Events, Decisions, PolicyUpdate, PolicyAck, Heartbeat,
                             HeartbeatAck, Bye, Err>;

/// Type tag of a message ("hello", "events", ...).
std::string_view type_tag(const Message& msg) noexcept;

/// Canonical JSON text of a message body. Throws FrameTooLarge past 1 MiB.
std::string encode_body(const Message& msg);
/// Throws MalformedMessage.
Message decode_body(std::string_view body);

/// Length prefix plus canonical body. Throws FrameTooLarge.
std::vector<std::uint8_t> encode_frame(const Message& msg);

struct DecodeResult {
  enum class Status : std::uint8_t { kOk, kNeedMoreData };
  Status status = Status::kNeedMoreData;
  std::optional<Message> message;
  std::size_t consumed = 0;

  bool ok() const noexcept { return status == Status::kOk; }
};

/// Decodes the first frame in `stream`. Returns kNeedMoreData until a whole
/// frame is available. Throws FramingError on a zero or oversized length
/// (the connection must be closed) and MalformedMessage on a bad body.
DecodeResult decode_frame(std::span<const std::uint8_t> stream);

/// Incremental reader over a byte stream.
class FrameBuffer {
 public:
  void append(std::span<const std::uint8_t> bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }
  /// Next complete message, if any. Consumes the frame even when its body
  /// is malformed (the error is rethrown).
  std::optional<Message> next();
  std::size_t buffered() const noexcept { return buffer_.size(); }

 private:
  std::vector<std::uint8_t> buffer_;
};

bool is_valid_utf8(std::string_view text) noexcept;

}  // namespace seaas::protocol
