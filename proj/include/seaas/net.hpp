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

// TCP carriers: the protocol listener and client, and the admin HTTP server.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "seaas/detection.hpp"
#include "seaas/transport.hpp"

namespace httplib {
class Client;
class Server;
}

namespace seaas {

class CloudService;

struct HostPort {
  std::string host;
  std::uint16_t port = 0;
};

/// "host:port"; throws std::invalid_argument.
HostPort parse_host_port(std::string_view text, std::uint16_t default_port);

/// Length-prefixed protocol listener. One thread per connection; messages on
/// a connection are handled strictly in order.
class ProtocolServer {
 public:
  explicit ProtocolServer(CloudService& service) : service_(service) {}
  ~ProtocolServer();

  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  /// Binds and starts accepting. Port 0 picks an ephemeral port.
  void start(const HostPort& listen);
  void stop();
  std::uint16_t port() const noexcept { return port_; }

 private:
  struct Connection;

  void accept_loop();
  void serve(const std::shared_ptr<Connection>& conn);
  void reap_loop();

  CloudService& service_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::thread reap_thread_;
  std::mutex conns_mutex_;
  std::list<std::shared_ptr<Connection>> conns_;
  std::list<std::thread> conn_threads_;
};

class TcpTransport : public Transport {
 public:
  explicit TcpTransport(HostPort server) : server_(std::move(server)) {}
  ~TcpTransport() override;

  void connect() override;
  void send(const protocol::Message& msg) override;
  std::optional<protocol::Message> receive(std::chrono::milliseconds timeout) override;
  void close() override;
  bool connected() const override { return fd_ >= 0; }

 private:
  HostPort server_;
  int fd_ = -1;
  protocol::FrameBuffer buffer_;
};

/// Serves handle_admin_request over HTTP; optionally serves static console
/// files under /ui.
class AdminServer {
 public:
  explicit AdminServer(CloudService& service, std::filesystem::path ui_dir = {});
  ~AdminServer();

  AdminServer(const AdminServer&) = delete;
  AdminServer& operator=(const AdminServer&) = delete;

  void start(const HostPort& listen);
  void stop();
  std::uint16_t port() const noexcept { return port_; }

 private:
  CloudService& service_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  std::uint16_t port_ = 0;
};

/// Blocking client for the admin API.
class AdminClient {
 public:
  explicit AdminClient(HostPort admin);
  ~AdminClient();

  struct Reply {
    int status = 0;
    std::string body;
  };

  /// `target` is the path plus query string. Throws TransportError when the
  /// server cannot be reached.
  Reply request(const std::string& method, const std::string& target, const std::string& body = {});

  /// Every threat in the feed, following cursors to the tail.
  std::vector<ThreatReport> threats();
  /// Installs a policy document; returns the new version. Throws Error
  /// carrying the server's detail on rejection.
  std::uint64_t put_policy(const std::string& document);

 private:
  std::unique_ptr<httplib::Client> http_;
};

}  // namespace seaas
