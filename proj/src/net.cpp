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

#include "seaas/net.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <stdexcept>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "seaas/admin_api.hpp"
#include "seaas/errors.hpp"
#include "seaas/json_codec.hpp"
#include "seaas/service.hpp"

namespace seaas {
namespace {

constexpr int kPollMs = 200;

void write_all(int fd, const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

addrinfo* resolve(const HostPort& hp, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(hp.port);
  const int rc = ::getaddrinfo(hp.host.empty() ? nullptr : hp.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) throw TransportError("cannot resolve " + hp.host + ": " + ::gai_strerror(rc));
  return res;
}

}  // namespace

HostPort parse_host_port(std::string_view text, std::uint16_t default_port) {
  HostPort hp;
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    hp.host = std::string(text);
    hp.port = default_port;
    return hp;
  }
  hp.host = std::string(text.substr(0, colon));
  const auto port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
    throw std::invalid_argument("bad port in '" + std::string(text) + "'");
  }
  hp.port = static_cast<std::uint16_t>(value);
  return hp;
}

// --- protocol server ---------------------------------------------------------------

struct ProtocolServer::Connection {
  int fd = -1;
  std::mutex write_mutex;
  bool open = true;

  void write(const protocol::Message& msg) {
    const auto frame = protocol::encode_frame(msg);
    std::lock_guard lock(write_mutex);
    if (!open) throw TransportError("connection closed");
    write_all(fd, frame.data(), frame.size());
  }

  void shut() {
    std::lock_guard lock(write_mutex);
    if (open) ::shutdown(fd, SHUT_RDWR);
    open = false;
  }
};

ProtocolServer::~ProtocolServer() { stop(); }

void ProtocolServer::start(const HostPort& listen) {
  addrinfo* res = resolve(listen, true);
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw TransportError("cannot listen on " + listen.host + ":" + std::to_string(listen.port));

  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                           : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  listen_fd_ = fd;
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  reap_thread_ = std::thread([this] { reap_loop(); });
}

void ProtocolServer::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  if (reap_thread_.joinable()) reap_thread_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  std::list<std::thread> threads;
  {
    std::lock_guard lock(conns_mutex_);
    for (auto& c : conns_) c->shut();
    threads.swap(conn_threads_);
  }
  for (auto& t : threads) t.join();
  std::lock_guard lock(conns_mutex_);
  for (auto& c : conns_) ::close(c->fd);
  conns_.clear();
}

void ProtocolServer::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, kPollMs) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(conns_mutex_);
    conns_.push_back(conn);
    conn_threads_.emplace_back([this, conn] { serve(conn); });
  }
}

void ProtocolServer::reap_loop() {
  int ticks = 0;
  while (running_) {
    std::this_thread::sleep_for(std::chrono::milliseconds(kPollMs));
    if (++ticks % 5 == 0) service_.reap_expired_sessions();
  }
}

void ProtocolServer::serve(const std::shared_ptr<Connection>& conn) {
  std::weak_ptr<Connection> weak = conn;
  auto push = [weak](const protocol::Message& msg) {
    auto c = weak.lock();
    if (!c) throw TransportError("connection gone");
    c->write(msg);
  };
  protocol::FrameBuffer buffer;
  std::uint8_t chunk[64 * 1024];
  try {
    while (running_) {
      pollfd p{conn->fd, POLLIN, 0};
      const int ready = ::poll(&p, 1, kPollMs);
      if (ready < 0 && errno != EINTR) break;
      if (ready <= 0) continue;
      const ssize_t n = ::recv(conn->fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      buffer.append(std::span<const std::uint8_t>(chunk, static_cast<std::size_t>(n)));
      while (auto msg = buffer.next()) {
        for (const auto& reply : service_.handle_message(*msg, push)) conn->write(reply);
      }
    }
  } catch (const MalformedMessage& e) {
    try {
      conn->write(protocol::Err{std::nullopt, "malformed_message", e.what()});
    } catch (const std::exception&) {
    }
  } catch (const FramingError& e) {
    spdlog::warn("closing connection: {}", e.what());
  } catch (const std::exception& e) {
    spdlog::warn("connection error: {}", e.what());
  }
  conn->shut();
}

// --- TCP client ------------------------------------------------------------------------

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::connect() {
  close();
  addrinfo* res = resolve(server_, false);
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw TransportError("cannot connect to " + server_.host + ":" + std::to_string(server_.port));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  fd_ = fd;
  buffer_ = protocol::FrameBuffer();
}

void TcpTransport::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void TcpTransport::send(const protocol::Message& msg) {
  if (fd_ < 0) throw TransportError("not connected");
  const auto frame = protocol::encode_frame(msg);
  try {
    write_all(fd_, frame.data(), frame.size());
  } catch (const TransportError&) {
    close();
    throw;
  }
}

std::optional<protocol::Message> TcpTransport::receive(std::chrono::milliseconds timeout) {
  if (fd_ < 0) throw TransportError("not connected");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::uint8_t chunk[64 * 1024];
  while (true) {
    if (auto msg = buffer_.next()) return msg;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno != EINTR) {
      close();
      throw TransportError("poll failed");
    }
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n <= 0) {
      close();
      throw TransportError("connection closed by server");
    }
    buffer_.append(std::span<const std::uint8_t>(chunk, static_cast<std::size_t>(n)));
  }
}

// --- admin HTTP -----------------------------------------------------------------------------

AdminServer::AdminServer(CloudService& service, std::filesystem::path ui_dir)
    : service_(service), http_(std::make_unique<httplib::Server>()) {
  if (!ui_dir.empty()) http_->set_mount_point("/ui", ui_dir.string());
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    AdminRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query.emplace(key, value);
    AdminResponse response = handle_admin_request(service_, request);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
  };
  http_->Get(".*", handler);
  http_->Put(".*", handler);
  http_->Post(".*", handler);
  http_->Delete(".*", handler);
}

AdminServer::~AdminServer() { stop(); }

void AdminServer::start(const HostPort& listen) {
  if (listen.port == 0) {
    const int port = http_->bind_to_any_port(listen.host);
    if (port < 0) throw TransportError("cannot bind admin port on " + listen.host);
    port_ = static_cast<std::uint16_t>(port);
  } else {
    if (!http_->bind_to_port(listen.host, listen.port)) {
      throw TransportError("cannot bind admin port " + listen.host + ":" + std::to_string(listen.port));
    }
    port_ = listen.port;
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

void AdminServer::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

// --- admin client ----------------------------------------------------------------------

AdminClient::AdminClient(HostPort admin)
    : http_(std::make_unique<httplib::Client>(admin.host.empty() ? "127.0.0.1" : admin.host, admin.port)) {
  http_->set_connection_timeout(std::chrono::seconds(5));
  http_->set_read_timeout(std::chrono::seconds(30));
}

AdminClient::~AdminClient() = default;

AdminClient::Reply AdminClient::request(const std::string& method, const std::string& target,
                                        const std::string& body) {
  httplib::Result res;
  if (method == "GET") {
    res = http_->Get(target);
  } else if (method == "PUT") {
    res = http_->Put(target, body, "application/json");
  } else if (method == "POST") {
    res = http_->Post(target, body, "application/json");
  } else if (method == "DELETE") {
    res = http_->Delete(target);
  } else {
    throw std::invalid_argument("unsupported method " + method);
  }
  if (!res) throw TransportError("admin request failed: " + httplib::to_string(res.error()));
  return Reply{res->status, res->body};
}

std::vector<ThreatReport> AdminClient::threats() {
  std::vector<ThreatReport> out;
  std::uint64_t cursor = 0;
  while (true) {
    const auto reply = request("GET", "/threats?since=" + std::to_string(cursor));
    if (reply.status != 200) throw TransportError("GET /threats returned " + std::to_string(reply.status));
    const auto page = json::Json::parse(reply.body);
    const auto& items = page.at("threats");
    for (const auto& t : items) out.push_back(json::threat_from_json(t));
    const auto next = page.at("cursor").get<std::uint64_t>();
    if (items.empty() || next == cursor) break;
    cursor = next;
  }
  return out;
}

std::uint64_t AdminClient::put_policy(const std::string& document) {
  const auto reply = request("PUT", "/policies", document);
  const auto body = json::Json::parse(reply.body, nullptr, false);
  if (reply.status != 200) {
    std::string detail = body.is_object() && body.contains("detail") ? body["detail"].get<std::string>() : reply.body;
    throw Error("policy rejected (" + std::to_string(reply.status) + "): " + detail);
  }
  return body.at("version").get<std::uint64_t>();
}

}  // namespace seaas
