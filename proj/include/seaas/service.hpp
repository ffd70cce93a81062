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

// The cloud back end: sessions, the active policy, the detection pipeline,
// the decision and threat stores, and their persistence.
//
// All protocol traffic and admin mutations go through CloudService. State is
// guarded by one mutex; policy snapshots are immutable and shared. When a
// data directory is configured every accepted event, decision, threat,
// quarantine change and policy change is appended to `events.log` before the
// reply leaves, and `snapshot.json` is rewritten periodically.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seaas/detection.hpp"
#include "seaas/event_log.hpp"
#include "seaas/json_codec.hpp"
#include "seaas/policy.hpp"
#include "seaas/protocol.hpp"

namespace seaas {

using Clock = std::function<std::int64_t()>;

/// Milliseconds since the Unix epoch.
std::int64_t system_clock_ms();

struct ServiceConfig {
  DetectionConfig detection;
  std::filesystem::path data_dir;  // empty: memory only
  std::uint64_t snapshot_every = 5000;  // log records between snapshots; 0 disables
  std::int64_t heartbeat_timeout_ms = protocol::kHeartbeatTimeoutMs;
  bool fsync = false;
};

struct DeviceRecord {
  DeviceDescriptor descriptor;
  std::uint64_t last_seq = 0;
};

/// Everything recovery must reproduce.
struct ServiceState {
  std::vector<PolicySet> policy_history;  // ascending versions; back() is active
  std::map<std::string, DeviceRecord> devices;
  std::vector<AccessEvent> events;      // accepted events, append order
  std::vector<Decision> decisions;      // append order
  std::vector<ThreatReport> threats;    // append order
  DetectionPipeline pipeline;
  std::uint64_t log_seq = 0;
  std::uint64_t log_bytes = 0;
};

/// Loads `snapshot.json` (when present) and replays `events.log` past it.
/// A torn final record, or a trailing event group missing its decision, is
/// cut off with a warning. An empty directory yields a fresh state whose
/// policy history is the built-in default (version 1).
ServiceState recover_state(const std::filesystem::path& data_dir, const DetectionConfig& detection = {});

json::Json snapshot_to_json(const ServiceState& state);
ServiceState snapshot_from_json(const json::Json& j, const DetectionConfig& detection);

template <typename T>
struct Page {
  std::vector<T> items;
  std::uint64_t cursor = 0;
};

struct DeviceInfo {
  DeviceDescriptor descriptor;
  std::uint64_t last_seq = 0;
  bool connected = false;
  std::optional<std::string> sid;
  std::uint64_t policy_version_acked = 0;
};

class CloudService {
 public:
  using PushSink = std::function<void(const protocol::Message&)>;

  /// Recovers from `config.data_dir` when set. `initial_policy` becomes the
  /// active policy on a fresh state, or the next version when it differs
  /// from a recovered one.
  explicit CloudService(ServiceConfig config = {}, std::optional<PolicySet> initial_policy = std::nullopt,
                        Clock clock = system_clock_ms);
  ~CloudService();

  CloudService(const CloudService&) = delete;
  CloudService& operator=(const CloudService&) = delete;

  // --- protocol ---------------------------------------------------------------

  /// Dispatches one inbound message. Replies are returned in order; pushes
  /// to other sessions go through their sinks. `push` is the sink for the
  /// session a hello creates.
  std::vector<protocol::Message> handle_message(const protocol::Message& msg, const PushSink& push = {});

  protocol::Message handshake(const protocol::Hello& hello, const PushSink& push = {});
  protocol::Message process_event_batch(const protocol::Events& batch);
  protocol::Message heartbeat(const protocol::Heartbeat& hb);
  void policy_ack(const protocol::PolicyAck& ack);
  void close_session(const std::string& sid);
  /// Closes sessions whose liveness deadline has passed; returns how many.
  std::size_t reap_expired_sessions();

  // --- admin ------------------------------------------------------------------

  /// Replaces the active policy with `document` as the next version.
  /// Throws ParseError/DuplicateRule/InvalidRule with the active version unchanged.
  std::uint64_t put_policy(std::string_view document);
  /// Installs or replaces the per-device quick rule for (app, resource).
  /// Throws UnknownResource or InvalidRule.
  std::uint64_t set_permission(const std::string& device_id, const std::string& app_id,
                               std::string_view resource, RuleDecision decision,
                               std::optional<Constraints> constraints = std::nullopt);
  bool lift_quarantine(const std::string& device_id, const std::string& app_id);

  /// Entries with 1-based feed position > `since`, oldest first. A cursor
  /// past the tail returns an empty page carrying the same cursor.
  Page<ThreatReport> list_threat_feed(std::uint64_t since, std::size_t limit = 500) const;
  Page<Decision> list_decisions(std::uint64_t since, std::size_t limit = 500) const;
  Page<AccessEvent> list_device_events(const std::string& device_id, std::uint64_t since,
                                       std::size_t limit = 500) const;
  std::vector<DeviceInfo> devices() const;

  std::shared_ptr<const PolicySet> active_policy() const { return policies_.active(); }
  std::shared_ptr<const PolicySet> policy_at(std::uint64_t version) const { return policies_.at_version(version); }

  void record_trial(json::Json report);
  std::vector<json::Json> trials() const;

  /// Writes snapshot.json now (no-op without a data directory).
  void snapshot();

  // --- inspection ---------------------------------------------------------------

  std::vector<Decision> decisions() const;
  std::vector<ThreatReport> threats() const;
  std::optional<Decision> stored_decision(const std::string& device_id, std::uint64_t event_seq) const;
  bool is_quarantined(const std::string& device_id, const std::string& app_id) const;
  std::int64_t now_ms() const { return clock_(); }

 private:
  struct Session {
    std::string sid;
    std::string device_id;
    std::uint64_t policy_version_acked = 0;
    std::int64_t deadline_ms = 0;
    PushSink push;
  };

  using PendingPush = std::pair<PushSink, protocol::Message>;

  Session* live_session_locked(const std::string& sid, std::int64_t now);
  void close_session_locked(const std::string& sid);
  std::vector<PendingPush> on_policy_change_locked(const std::shared_ptr<const PolicySet>& set,
                                                   std::string_view reason, std::int64_t now);
  void log_locked(const std::vector<std::pair<LogKind, json::Json>>& group, std::int64_t now);
  void maybe_snapshot_locked();
  void snapshot_locked();
  static void deliver(std::vector<PendingPush> pushes);

  ServiceConfig config_;
  Clock clock_;
  PolicyStore policies_;

  mutable std::mutex mutex_;
  ServiceState state_;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> decision_index_;
  std::map<std::string, Session> sessions_;           // by sid
  std::map<std::string, std::string> device_session_;  // device_id -> sid
  std::vector<json::Json> trials_;
  std::unique_ptr<EventLog> log_;
  std::uint64_t snapshot_seq_ = 0;
  std::uint64_t next_sid_ = 1;
};

}  // namespace seaas
