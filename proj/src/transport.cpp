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

#include "seaas/transport.hpp"

#include "seaas/errors.hpp"
#include "seaas/service.hpp"

namespace seaas {

LoopbackTransport::~LoopbackTransport() { close(); }

void LoopbackTransport::connect() {
  if (refuse_reconnect_) throw TransportError("loopback: connection refused");
  close();
  inbox_ = std::make_shared<Inbox>();
}

bool LoopbackTransport::connected() const { return inbox_ != nullptr && inbox_->open; }

void LoopbackTransport::close() {
  if (!inbox_) return;
  {
    std::lock_guard lock(inbox_->mutex);
    inbox_->open = false;
  }
  inbox_->cv.notify_all();
  inbox_.reset();
}

void LoopbackTransport::sever() { close(); }

void LoopbackTransport::sever_before_event_batch(std::size_t n) { sever_countdown_ = n; }

void LoopbackTransport::refuse_reconnect(bool refuse) { refuse_reconnect_ = refuse; }

void LoopbackTransport::send(const protocol::Message& msg) {
  if (std::holds_alternative<protocol::Events>(msg) && sever_countdown_) {
    if (*sever_countdown_ <= 1) {
      sever_countdown_.reset();
      sever();
    } else {
      --*sever_countdown_;
    }
  }
  if (!connected()) throw TransportError("loopback: not connected");

  // Device -> wire -> cloud.
  const auto frame = protocol::encode_frame(msg);
  auto decoded = protocol::decode_frame(frame);
  std::weak_ptr<Inbox> weak = inbox_;
  auto enqueue = [weak](const protocol::Message& out) {
    auto inbox = weak.lock();
    if (!inbox) throw TransportError("loopback: peer gone");
    auto bytes = protocol::encode_frame(out);
    {
      std::lock_guard lock(inbox->mutex);
      if (!inbox->open) throw TransportError("loopback: peer gone");
      inbox->frames.push_back(std::move(bytes));
    }
    inbox->cv.notify_all();
  };
  for (const auto& reply : service_.handle_message(*decoded.message, enqueue)) enqueue(reply);
}

std::optional<protocol::Message> LoopbackTransport::receive(std::chrono::milliseconds timeout) {
  auto inbox = inbox_;
  if (!inbox) throw TransportError("loopback: not connected");
  std::unique_lock lock(inbox->mutex);
  if (!inbox->cv.wait_for(lock, timeout, [&] { return !inbox->frames.empty() || !inbox->open; })) {
    return std::nullopt;
  }
  if (inbox->frames.empty()) throw TransportError("loopback: closed");
  auto frame = std::move(inbox->frames.front());
  inbox->frames.pop_front();
  lock.unlock();
  // Cloud -> wire -> device.
  return protocol::decode_frame(frame).message;
}

}  // namespace seaas
