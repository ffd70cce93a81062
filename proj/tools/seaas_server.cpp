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

// seaas-server: protocol listener plus admin HTTP API.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "seaas/admin_api.hpp"
#include "seaas/errors.hpp"
#include "seaas/net.hpp"
#include "seaas/service.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SeaaS cloud service"};
  std::string listen = "0.0.0.0:7740";
  std::string admin = "0.0.0.0:7741";
  std::string data_dir;
  std::string policy_file;
  std::string ui_dir;
  std::uint64_t snapshot_every = 5000;
  bool fsync = false;
  app.add_option("--listen", listen, "Protocol address host:port");
  app.add_option("--admin", admin, "Admin HTTP address host:port");
  app.add_option("--data", data_dir, "Directory for events.log and snapshot.json");
  app.add_option("--policy", policy_file, "Policy document installed at startup");
  app.add_option("--ui", ui_dir, "Static console files served under /ui");
  app.add_option("--snapshot-every", snapshot_every, "Log records between snapshots (0 disables)");
  app.add_flag("--fsync", fsync, "fsync the log after every append");
  CLI11_PARSE(app, argc, argv);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    seaas::ServiceConfig config;
    config.data_dir = data_dir;
    config.snapshot_every = snapshot_every;
    config.fsync = fsync;
    std::optional<seaas::PolicySet> policy;
    if (!policy_file.empty()) policy = seaas::parse_policy_document(read_file(policy_file));

    seaas::CloudService service(config, policy);
    seaas::ProtocolServer protocol_server(service);
    protocol_server.start(seaas::parse_host_port(listen, seaas::protocol::kDefaultPort));
    seaas::AdminServer admin_server(service, ui_dir);
    admin_server.start(seaas::parse_host_port(admin, seaas::kDefaultAdminPort));
    spdlog::info("protocol on port {}, admin on port {}, policy v{}", protocol_server.port(), admin_server.port(),
                 service.active_policy()->version());

    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("shutting down");
    admin_server.stop();
    protocol_server.stop();
    service.snapshot();
  } catch (const seaas::PolicyError& e) {
    std::cerr << policy_file << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "seaas-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
