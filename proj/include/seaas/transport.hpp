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

// Device-side connections to the cloud service.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "seaas/protocol.hpp"

namespace seaas {

class CloudService;

/// An ordered, reliable message channel to the cloud service. Methods throw
/// TransportError once the channel is down.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual void connect() = 0;
  virtual void send(const protocol::Message& msg) = 0;
  /// Next inbound message, or nullopt after `timeout`.
  virtual std::optional<protocol::Message> receive(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
  virtual bool connected() const = 0;
};

/// In-process channel to a CloudService. Every message still goes through
/// encode_frame/decode_frame on both sides.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(CloudService& service) : service_(service) {}
  ~LoopbackTransport() override;

  void connect() override;
  void send(const protocol::Message& msg) override;
  std::optional<protocol::Message> receive(std::chrono::milliseconds timeout) override;
  void close() override;
  bool connected() const override;

  /// Drops the channel now; later sends throw until connect().
  void sever();
  /// Drops the channel right before the `n`-th events send from now.
  void sever_before_event_batch(std::size_t n);
  /// While set, connect() fails.
  void refuse_reconnect(bool refuse);

 private:
  struct Inbox {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> frames;
    bool open = true;
  };

  CloudService& service_;
  std::shared_ptr<Inbox> inbox_;
  std::optional<std::size_t> sever_countdown_;
  bool refuse_reconnect_ = false;
};

}  // namespace seaas
