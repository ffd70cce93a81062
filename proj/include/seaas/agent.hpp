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

// The simulated device: replays a scenario script as access events, either
// evaluating the cached policy on-device (LOCAL) or shipping events to the
// cloud service (OFFLOADED), and accounts the device-side work it spent.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "seaas/detection.hpp"
#include "seaas/json_codec.hpp"
#include "seaas/policy.hpp"
#include "seaas/resource.hpp"

namespace seaas {

class Transport;

enum class AgentMode : std::uint8_t { kLocal, kOffloaded };

std::string_view to_string(AgentMode m) noexcept;
/// "local" or "offloaded" (case-insensitive). Throws std::invalid_argument.
AgentMode parse_agent_mode(std::string_view name);

// --- scenario scripts ------------------------------------------------------------

enum class ScenarioLabel : std::uint8_t {
  kBenign,
  kPolicyViolation,
  kAnomalousFrequency,
  kBackgroundExfiltration,
};

/// "benign" or "threat:<THREAT_TYPE>".
std::string_view to_string(ScenarioLabel l) noexcept;
ScenarioLabel parse_scenario_label(std::string_view text);

struct ScriptedEvent {
  std::int64_t at_ms = 0;
  std::string app;
  Resource resource = Resource::kMicrophone;
  Action action = Action::kRead;
  AppState app_state = AppState::kForeground;
  std::uint64_t payload_bytes = 0;
  ScenarioLabel label = ScenarioLabel::kBenign;

  bool is_threat() const noexcept { return label != ScenarioLabel::kBenign; }

  friend bool operator==(const ScriptedEvent&, const ScriptedEvent&) = default;
};

struct ScenarioScript {
  std::vector<ScriptedEvent> events;

  friend bool operator==(const ScenarioScript&, const ScenarioScript&) = default;
};

/// JSON lines, one scripted event per line; blank lines are skipped.
/// Throws ScenarioError naming the offending line.
ScenarioScript parse_scenario(std::string_view text);
ScenarioScript load_scenario(const std::filesystem::path& file);
std::string serialize_scenario(const ScenarioScript& script);

// --- work accounting -----------------------------------------------------------------

enum class WorkCategory : std::uint8_t { kGenerate, kEvaluate, kWindow, kEncode, kApply };
inline constexpr std::size_t kWorkCategoryCount = 5;

std::string_view to_string(WorkCategory c) noexcept;
/// Throws LedgerError.
WorkCategory parse_work_category(std::string_view name);

/// generate 1, evaluate 4 + ceil(rules / 4), window 2, encode 2, apply 1.
std::uint64_t work_cost(WorkCategory step, std::size_t rules_count) noexcept;

struct WorkLedger {
  AgentMode mode = AgentMode::kLocal;
  std::uint64_t total = 0;
  std::array<std::uint64_t, kWorkCategoryCount> by_category{};

  std::uint64_t units(WorkCategory c) const noexcept { return by_category[static_cast<std::size_t>(c)]; }

  friend bool operator==(const WorkLedger&, const WorkLedger&) = default;
};

WorkLedger account_work(WorkLedger ledger, WorkCategory step, std::size_t rules_count);
/// Throws LedgerError on an unknown category name.
WorkLedger account_work(WorkLedger ledger, std::string_view step, std::size_t rules_count);

// --- fallback -------------------------------------------------------------------------

class FallbackCache {
 public:
  using Key = std::tuple<std::string, Resource, Action, AppState>;

  void set_policy(PolicySet policy) { policy_ = std::move(policy); }
  const std::optional<PolicySet>& policy() const noexcept { return policy_; }

  void remember(const AccessEvent& event, const Decision& decision);
  const Decision* lookup(const AccessEvent& event) const;
  std::size_t size() const noexcept { return decisions_.size(); }

 private:
  std::optional<PolicySet> policy_;
  std::map<Key, Decision> decisions_;
};

/// Cached decision for the event's (app, resource, action, state) flagged
/// stale, or fail-closed: DENY for critical resources, ALLOW otherwise.
Decision fallback_decision(const AccessEvent& event, const FallbackCache& cache);

// --- runs -------------------------------------------------------------------------------

struct AgentConfig {
  DeviceDescriptor device{"device-1", ResourceSet::all(), "seaas-agent/1"};
  std::size_t batch_size = 32;
  std::chrono::milliseconds decision_timeout{2000};
  std::chrono::milliseconds heartbeat_interval{5000};
  DetectionConfig detection;
};

struct EventOutcome {
  std::uint64_t event_seq = 0;
  Decision decision;
  bool pre_blocked = false;
  bool fallback = false;

  friend bool operator==(const EventOutcome&, const EventOutcome&) = default;
};

struct AgentRunReport {
  std::string device_id;
  AgentMode mode = AgentMode::kLocal;
  std::uint64_t events_emitted = 0;
  std::uint64_t allowed = 0;
  std::uint64_t denied = 0;
  std::uint64_t constrained = 0;
  std::uint64_t pre_blocked = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t stale = 0;
  std::uint64_t policy_version = 0;
  WorkLedger work;
  std::vector<EventOutcome> outcomes;  // one per scripted event, script order

  friend bool operator==(const AgentRunReport&, const AgentRunReport&) = default;
};

json::Json to_json(const AgentRunReport& report);

/// LOCAL: evaluates `policy` on-device. `transport` is unused.
/// OFFLOADED: handshakes over `transport` and offloads events in batches;
/// falls back to the cache whenever the channel is down or a reply times
/// out. `policy` is ignored in this mode.
/// Throws ScenarioError before emitting anything when the script is invalid.
AgentRunReport run_scenario(const ScenarioScript& script, AgentMode mode, Transport* transport,
                            const PolicySet& policy, const AgentConfig& config = {});

/// Checks script invariants (non-decreasing times, valid app ids,
/// resources in the inventory). Throws ScenarioError.
void check_scenario(const ScenarioScript& script, const DeviceDescriptor& device);

}  // namespace seaas
