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

// agent: replays a scenario script as one simulated device.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seaas/agent.hpp"
#include "seaas/errors.hpp"
#include "seaas/net.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Policy a LOCAL run evaluates when no file is given: whatever the server hands out on hello.
seaas::PolicySet fetch_policy(seaas::Transport& transport, const seaas::DeviceDescriptor& device) {
  transport.connect();
  transport.send(seaas::protocol::Hello{device});
  auto reply = transport.receive(std::chrono::seconds(5));
  if (!reply || !std::holds_alternative<seaas::protocol::HelloAck>(*reply)) {
    throw seaas::TransportError("no hello_ack from server");
  }
  auto ack = std::get<seaas::protocol::HelloAck>(std::move(*reply));
  transport.send(seaas::protocol::Bye{ack.sid});
  transport.close();
  return ack.policy;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SeaaS device agent"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Replay a scenario script");
  std::string script_file;
  std::string mode_name = "offloaded";
  std::string server = "127.0.0.1:7740";
  std::string report_file;
  std::string policy_file;
  seaas::AgentConfig config;
  std::int64_t timeout_ms = 2000;
  run->add_option("--script", script_file, "Scenario script (JSON lines)")->required();
  run->add_option("--mode", mode_name, "local or offloaded")->check(CLI::IsMember({"local", "offloaded"}));
  run->add_option("--server", server, "Cloud service host:port");
  run->add_option("--report", report_file, "Write the run report here (default: stdout)");
  run->add_option("--policy", policy_file, "Policy document for LOCAL mode");
  run->add_option("--device", config.device.device_id, "Device id");
  run->add_option("--batch", config.batch_size, "Events per offloaded batch")->check(CLI::PositiveNumber);
  run->add_option("--timeout-ms", timeout_ms, "Decision timeout")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    config.decision_timeout = std::chrono::milliseconds(timeout_ms);
    const auto mode = seaas::parse_agent_mode(mode_name);
    const auto script = seaas::load_scenario(script_file);
    seaas::TcpTransport transport(seaas::parse_host_port(server, seaas::protocol::kDefaultPort));

    seaas::PolicySet policy;
    if (mode == seaas::AgentMode::kLocal) {
      policy = policy_file.empty() ? fetch_policy(transport, config.device)
                                   : seaas::parse_policy_document(read_file(policy_file));
    }
    const auto report = seaas::run_scenario(script, mode, &transport, policy, config);
    const auto text = seaas::to_json(report).dump(2) + "\n";
    if (report_file.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(report_file, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + report_file);
      out << text;
    }
    std::cerr << report.events_emitted << " events, " << report.denied << " denied, " << report.work.total
              << " work units\n";
  } catch (const seaas::ScenarioError& e) {
    std::cerr << script_file << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "agent: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
