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

#include "seaas/protocol.hpp"

#include <array>
#include <type_traits>

#include "seaas/errors.hpp"
#include "seaas/json_codec.hpp"

namespace seaas::protocol {
namespace {

using json::Json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json header(std::string_view tag, const std::string& sid) {
  Json j = Json::object();
  j["t"] = tag;
  j["sid"] = sid;
  return j;
}

Json to_json(const Message& msg) {
  return std::visit(
      Overloaded{
          [](const Hello& m) {
            Json j = Json::object();
            j["t"] = "hello";
            j["device"] = json::to_json(m.device);
            return j;
          },
          [](const HelloAck& m) {
            Json j = header("hello_ack", m.sid);
            j["version"] = m.version;
            j["policy"] = json::to_json(m.policy);
            j["last_seq"] = m.last_seq;
            return j;
          },
          [](const Events& m) {
            Json j = header("events", m.sid);
            Json events = Json::array();
            for (const auto& e : m.events) events.push_back(json::to_json(e));
            j["events"] = std::move(events);
            return j;
          },
          [](const Decisions& m) {
            Json j = header("decisions", m.sid);
            Json decisions = Json::array();
            for (const auto& d : m.decisions) decisions.push_back(json::to_json(d));
            j["decisions"] = std::move(decisions);
            return j;
          },
          [](const PolicyUpdate& m) {
            Json j = header("policy_update", m.sid);
            j["version"] = m.version;
            j["policy"] = json::to_json(m.policy);
            return j;
          },
          [](const PolicyAck& m) {
            Json j = header("policy_ack", m.sid);
            j["version"] = m.version;
            return j;
          },
          [](const Heartbeat& m) { return header("hb", m.sid); },
          [](const HeartbeatAck& m) { return header("hb_ack", m.sid); },
          [](const Bye& m) { return header("bye", m.sid); },
          [](const Err& m) {
            Json j = Json::object();
            j["t"] = "err";
            if (m.sid) j["sid"] = *m.sid;
            j["code"] = m.code;
            j["detail"] = m.detail;
            return j;
          },
      },
      msg);
}

void only_keys(const Json& j, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw MalformedMessage("unexpected field '" + key + "'");
  }
}

PolicySet embedded_policy(const Json& j) {
  try {
    return json::policy_from_json(json::field(j, "policy"));
  } catch (const PolicyError& e) {
    throw MalformedMessage(std::string("embedded policy: ") + e.what());
  }
}

Message from_json(const Json& j) {
  if (!j.is_object()) throw MalformedMessage("message body must be a JSON object");
  const std::string t = json::get_string(j, "t");
  if (t == "hello") {
    only_keys(j, {"t", "device"});
    return Hello{json::device_from_json(json::field(j, "device"))};
  }
  if (t == "err") {
    only_keys(j, {"t", "sid", "code", "detail"});
    Err e;
    if (j.contains("sid")) e.sid = json::get_string(j, "sid");
    e.code = json::get_string(j, "code");
    e.detail = json::get_string(j, "detail");
    return e;
  }
  const std::string sid = json::get_string(j, "sid");
  if (t == "hello_ack") {
    only_keys(j, {"t", "sid", "version", "policy", "last_seq"});
    return HelloAck{sid, json::get_u64(j, "version"), embedded_policy(j), json::get_u64(j, "last_seq")};
  }
  if (t == "events") {
    only_keys(j, {"t", "sid", "events"});
    const Json& arr = json::field(j, "events");
    if (!arr.is_array()) throw MalformedMessage("field 'events' must be an array");
    Events m{sid, {}};
    m.events.reserve(arr.size());
    for (const auto& e : arr) m.events.push_back(json::event_from_json(e));
    return m;
  }
  if (t == "decisions") {
    only_keys(j, {"t", "sid", "decisions"});
    const Json& arr = json::field(j, "decisions");
    if (!arr.is_array()) throw MalformedMessage("field 'decisions' must be an array");
    Decisions m{sid, {}};
    m.decisions.reserve(arr.size());
    for (const auto& d : arr) m.decisions.push_back(json::decision_from_json(d));
    return m;
  }
  if (t == "policy_update") {
    only_keys(j, {"t", "sid", "version", "policy"});
    return PolicyUpdate{sid, json::get_u64(j, "version"), embedded_policy(j)};
  }
  if (t == "policy_ack") {
    only_keys(j, {"t", "sid", "version"});
    return PolicyAck{sid, json::get_u64(j, "version")};
  }
  if (t == "hb") {
    only_keys(j, {"t", "sid"});
    return Heartbeat{sid};
  }
  if (t == "hb_ack") {
    only_keys(j, {"t", "sid"});
    return HeartbeatAck{sid};
  }
  if (t == "bye") {
    only_keys(j, {"t", "sid"});
    return Bye{sid};
  }
  throw MalformedMessage("unknown message type '" + t + "'");
}

std::uint32_t read_be32(std::span<const std::uint8_t> b) {
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

}  // namespace

std::string_view type_tag(const Message& msg) noexcept {
  static constexpr std::array<std::string_view, std::variant_size_v<Message>> kTags = {
      "hello", "hello_ack", "events", "decisions", "policy_update", "policy_ack", "hb", "hb_ack", "bye", "err"};
  return kTags[msg.index()];
}

bool is_valid_utf8(std::string_view text) noexcept {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and values past U+10FFFF.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

std::string encode_body(const Message& msg) {
  std::string body = to_json(msg).dump();
  if (body.size() > kMaxFrameBody) {
    throw FrameTooLarge("message body of " + std::to_string(body.size()) + " bytes exceeds " +
                        std::to_string(kMaxFrameBody));
  }
  return body;
}

Message decode_body(std::string_view body) {
  if (!is_valid_utf8(body)) throw MalformedMessage("body is not valid UTF-8");
  Json j;
  try {
    j = Json::parse(body.begin(), body.end());
  } catch (const nlohmann::json::exception& e) {
    throw MalformedMessage(std::string("body is not JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const MalformedMessage&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedMessage(e.what());
  } catch (const Error& e) {
    throw MalformedMessage(e.what());
  }
}

std::vector<std::uint8_t> encode_frame(const Message& msg) {
  const std::string body = encode_body(msg);
  const auto len = static_cast<std::uint32_t>(body.size());
  std::vector<std::uint8_t> out;
  out.reserve(body.size() + 4);
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> stream) {
  DecodeResult result;
  if (stream.size() < 4) return result;
  const std::uint32_t len = read_be32(stream.first(4));
  if (len == 0 || len > kMaxFrameBody) {
    throw FramingError("frame length " + std::to_string(len) + " outside [1, " +
                       std::to_string(kMaxFrameBody) + "]");
  }
  if (stream.size() < std::size_t{len} + 4) return result;
  const auto body = stream.subspan(4, len);
  result.message = decode_body(std::string_view(reinterpret_cast<const char*>(body.data()), body.size()));
  result.status = DecodeResult::Status::kOk;
  result.consumed = std::size_t{len} + 4;
  return result;
}

std::optional<Message> FrameBuffer::next() {
  if (buffer_.size() < 4) return std::nullopt;
  const std::uint32_t len = read_be32(buffer_);
  if (len == 0 || len > kMaxFrameBody) {
    throw FramingError("frame length " + std::to_string(len) + " outside [1, " +
                       std::to_string(kMaxFrameBody) + "]");
  }
  const std::size_t total = std::size_t{len} + 4;
  if (buffer_.size() < total) return std::nullopt;
  const std::string body(buffer_.begin() + 4, buffer_.begin() + static_cast<std::ptrdiff_t>(total));
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(total));
  return decode_body(body);
}

}  // namespace seaas::protocol
