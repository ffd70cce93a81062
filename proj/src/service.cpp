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

#include "seaas/service.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>

#include <spdlog/spdlog.h>

#include "seaas/errors.hpp"

namespace seaas {

using json::Json;

std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

constexpr const char* kLogFile = "events.log";
constexpr const char* kSnapshotFile = "snapshot.json";

Json policy_change_payload(const PolicySet& set, std::string_view reason) {
  Json j = Json::object();
  j["version"] = set.version();
  j["reason"] = reason;
  j["policy"] = json::to_json(set);
  return j;
}

Json quarantine_payload(const std::string& device_id, const std::string& app_id, std::string_view action) {
  Json j = Json::object();
  j["device_id"] = device_id;
  j["app_id"] = app_id;
  j["action"] = action;
  return j;
}

void install_policy(ServiceState& state, PolicySet set) {
  if (!state.policy_history.empty() && state.policy_history.back().version() == set.version()) {
    state.policy_history.back() = std::move(set);
    return;
  }
  if (!state.policy_history.empty() && state.policy_history.back().version() > set.version()) {
    throw StorageError("policy version " + std::to_string(set.version()) + " regresses");
  }
  state.policy_history.push_back(std::move(set));
}

DeviceRecord& device_record(ServiceState& state, const std::string& device_id) {
  auto it = state.devices.find(device_id);
  if (it == state.devices.end()) {
    DeviceRecord rec;
    rec.descriptor.device_id = device_id;
    it = state.devices.emplace(device_id, std::move(rec)).first;
  }
  return it->second;
}

// Records produced by one accepted event: EVENT, DECISION, then THREAT when
// the decision carries a mitigation, then QUARANTINE when that mitigation
// quarantines the app.
struct EventGroup {
  std::uint64_t first_seq = 0;
  std::uint64_t offset = 0;
  AccessEvent event;
  std::optional<Decision> decision;
  std::optional<ThreatReport> threat;
  bool quarantine_seen = false;

  bool complete() const {
    if (!decision) return false;
    if (decision->mitigation && !threat) return false;
    if (threat && threat->mitigation.kind == MitigationKind::kQuarantineApp && !quarantine_seen) return false;
    return true;
  }
};

void apply_group(ServiceState& state, EventGroup& g) {
  DeviceRecord& dev = device_record(state, g.event.device_id);
  dev.last_seq = std::max(dev.last_seq, g.event.event_seq);
  state.pipeline.replay_event(g.event);
  state.events.push_back(std::move(g.event));
  state.decisions.push_back(std::move(*g.decision));
  if (g.threat) {
    state.pipeline.replay_threat(*g.threat);
    if (g.quarantine_seen) state.pipeline.quarantine(g.threat->device_id, g.threat->app_id);
    state.threats.push_back(std::move(*g.threat));
  }
}

}  // namespace

// --- snapshots -------------------------------------------------------------------

Json snapshot_to_json(const ServiceState& state) {
  Json j = Json::object();
  j["log_seq"] = state.log_seq;
  Json policies = Json::array();
  for (const auto& p : state.policy_history) policies.push_back(json::to_json(p));
  j["policies"] = std::move(policies);
  Json devices = Json::array();
  for (const auto& [id, rec] : state.devices) {
    Json d = Json::object();
    d["device"] = json::to_json(rec.descriptor);
    d["last_seq"] = rec.last_seq;
    devices.push_back(std::move(d));
  }
  j["devices"] = std::move(devices);
  Json events = Json::array();
  for (const auto& e : state.events) events.push_back(json::to_json(e));
  j["events"] = std::move(events);
  Json decisions = Json::array();
  for (const auto& d : state.decisions) decisions.push_back(json::to_json(d));
  j["decisions"] = std::move(decisions);
  Json threats = Json::array();
  for (const auto& t : state.threats) threats.push_back(json::to_json(t));
  j["threats"] = std::move(threats);
  Json quarantine = Json::array();
  for (const auto& [device, app] : state.pipeline.quarantined()) quarantine.push_back(Json::array({device, app}));
  j["quarantine"] = std::move(quarantine);
  Json history = Json::array();
  for (const auto& [key, count] : state.pipeline.high_history_entries()) {
    history.push_back(Json::array({key.first, key.second, count}));
  }
  j["high_history"] = std::move(history);
  return j;
}

ServiceState snapshot_from_json(const Json& j, const DetectionConfig& detection) {
  ServiceState state;
  state.pipeline = DetectionPipeline(detection);
  state.log_seq = json::get_u64(j, "log_seq");
  for (const auto& p : json::field(j, "policies")) install_policy(state, json::policy_from_json(p));
  for (const auto& d : json::field(j, "devices")) {
    DeviceRecord rec{json::device_from_json(json::field(d, "device")), json::get_u64(d, "last_seq")};
    state.devices[rec.descriptor.device_id] = std::move(rec);
  }
  for (const auto& e : json::field(j, "events")) {
    state.events.push_back(json::event_from_json(e));
    state.pipeline.replay_event(state.events.back());
  }
  for (const auto& d : json::field(j, "decisions")) state.decisions.push_back(json::decision_from_json(d));
  for (const auto& t : json::field(j, "threats")) state.threats.push_back(json::threat_from_json(t));
  for (const auto& q : json::field(j, "quarantine")) {
    state.pipeline.quarantine(q.at(0).get<std::string>(), q.at(1).get<std::string>());
  }
  for (const auto& h : json::field(j, "high_history")) {
    state.pipeline.set_high_history(h.at(0).get<std::string>(), h.at(1).get<std::string>(),
                                    h.at(2).get<std::uint64_t>());
  }
  if (state.policy_history.empty()) state.policy_history.emplace_back();
  return state;
}

// --- recovery ----------------------------------------------------------------------

ServiceState recover_state(const std::filesystem::path& data_dir, const DetectionConfig& detection) {
  ServiceState state;
  state.pipeline = DetectionPipeline(detection);
  const auto snapshot_path = data_dir / kSnapshotFile;
  bool from_snapshot = false;
  if (std::filesystem::exists(snapshot_path)) {
    std::ifstream in(snapshot_path);
    try {
      state = snapshot_from_json(Json::parse(in), detection);
      from_snapshot = true;
    } catch (const std::exception& e) {
      throw StorageError(snapshot_path.string() + ": unreadable snapshot: " + e.what());
    }
  }
  if (state.policy_history.empty()) state.policy_history.emplace_back();

  const auto log_path = data_dir / kLogFile;
  LogReadResult log = read_log(log_path);
  const std::uint64_t snapshot_seq = state.log_seq;
  if (from_snapshot && snapshot_seq > 0 && (log.records.empty() || log.records.back().seq < snapshot_seq)) {
    throw StorageError(log_path.string() + " ends before snapshot position " + std::to_string(snapshot_seq));
  }

  std::optional<EventGroup> group;
  auto flush_group = [&] {
    apply_group(state, *group);
    group.reset();
  };
  try {
    for (const auto& rec : log.records) {
      if (rec.seq <= snapshot_seq) continue;
      switch (rec.kind) {
        case LogKind::kEvent:
          if (group) throw StorageError("event group at seq " + std::to_string(group->first_seq) + " is incomplete");
          group = EventGroup{rec.seq, rec.offset, json::event_from_json(rec.payload), {}, {}, false};
          break;
        case LogKind::kDecision: {
          Decision d = json::decision_from_json(rec.payload);
          if (!group || group->decision || d.device_id != group->event.device_id ||
              d.event_seq != group->event.event_seq) {
            throw StorageError("decision at seq " + std::to_string(rec.seq) + " has no matching event");
          }
          group->decision = std::move(d);
          break;
        }
        case LogKind::kThreat:
          if (!group || !group->decision || group->threat) {
            throw StorageError("threat at seq " + std::to_string(rec.seq) + " outside an event group");
          }
          group->threat = json::threat_from_json(rec.payload);
          break;
        case LogKind::kQuarantine: {
          const std::string device = json::get_string(rec.payload, "device_id");
          const std::string app = json::get_string(rec.payload, "app_id");
          const std::string action = json::get_string(rec.payload, "action");
          if (action == "add") {
            if (!group || !group->threat) {
              throw StorageError("quarantine at seq " + std::to_string(rec.seq) + " outside an event group");
            }
            group->quarantine_seen = true;
          } else if (action == "lift") {
            if (group) throw StorageError("event group at seq " + std::to_string(group->first_seq) + " is incomplete");
            state.pipeline.lift_quarantine(device, app);
          } else {
            throw StorageError("unknown quarantine action '" + action + "'");
          }
          break;
        }
        case LogKind::kPolicyChange:
          if (group) throw StorageError("event group at seq " + std::to_string(group->first_seq) + " is incomplete");
          install_policy(state, json::policy_from_json(json::field(rec.payload, "policy")));
          break;
        case LogKind::kDevice: {
          if (group) throw StorageError("event group at seq " + std::to_string(group->first_seq) + " is incomplete");
          DeviceDescriptor d = json::device_from_json(rec.payload);
          device_record(state, d.device_id).descriptor = std::move(d);
          break;
        }
      }
      if (group && group->complete()) flush_group();
    }
  } catch (const StorageError&) {
    throw;
  } catch (const Error& e) {
    throw StorageError(log_path.string() + ": bad record payload: " + e.what());
  }

  std::uint64_t valid_bytes = log.valid_bytes;
  if (group) {
    spdlog::warn("{}: dropping incomplete event group starting at seq {}", log_path.string(), group->first_seq);
    valid_bytes = group->offset;
    std::filesystem::resize_file(log_path, valid_bytes);
  }
  state.log_seq = group ? group->first_seq - 1 : (log.records.empty() ? snapshot_seq : log.records.back().seq);
  state.log_bytes = valid_bytes;
  return state;
}

// --- service -----------------------------------------------------------------------

CloudService::CloudService(ServiceConfig config, std::optional<PolicySet> initial_policy, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  if (!config_.data_dir.empty()) {
    std::filesystem::create_directories(config_.data_dir);
    state_ = recover_state(config_.data_dir, config_.detection);
    log_ = std::make_unique<EventLog>(config_.data_dir / kLogFile, state_.log_seq, config_.fsync);
  } else {
    state_.pipeline = DetectionPipeline(config_.detection);
    state_.policy_history.emplace_back();
  }
  const bool fresh = state_.log_seq == 0;
  std::optional<std::string_view> reason;
  if (fresh) reason = "initial";
  if (initial_policy) {
    const PolicySet& active = state_.policy_history.back();
    if (fresh) {
      state_.policy_history.back() = initial_policy->with_version(1);
    } else if (initial_policy->rules() != active.rules() || initial_policy->defaults() != active.defaults()) {
      state_.policy_history.push_back(initial_policy->with_version(active.version() + 1));
      reason = "startup";
    }
  }
  for (const auto& p : state_.policy_history) policies_.restore(p);
  for (std::size_t i = 0; i < state_.decisions.size(); ++i) {
    decision_index_[{state_.decisions[i].device_id, state_.decisions[i].event_seq}] = i;
  }
  snapshot_seq_ = state_.log_seq;
  if (log_ && reason) log_locked({{LogKind::kPolicyChange, policy_change_payload(*policies_.active(), *reason)}}, clock_());
}

CloudService::~CloudService() = default;

void CloudService::log_locked(const std::vector<std::pair<LogKind, Json>>& group, std::int64_t now) {
  if (!log_) {
    state_.log_seq += group.size();
    return;
  }
  state_.log_seq = log_->append(group, now);
}

void CloudService::maybe_snapshot_locked() {
  if (!log_ || config_.snapshot_every == 0) return;
  if (state_.log_seq - snapshot_seq_ >= config_.snapshot_every) snapshot_locked();
}

void CloudService::snapshot_locked() {
  if (config_.data_dir.empty()) return;
  const auto path = config_.data_dir / kSnapshotFile;
  const auto tmp = config_.data_dir / "snapshot.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << snapshot_to_json(state_).dump();
    if (!out) throw StorageError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  snapshot_seq_ = state_.log_seq;
}

void CloudService::snapshot() {
  std::lock_guard lock(mutex_);
  snapshot_locked();
}

void CloudService::deliver(std::vector<PendingPush> pushes) {
  for (auto& [sink, msg] : pushes) {
    try {
      sink(msg);
    } catch (const std::exception& e) {
      spdlog::warn("policy push failed: {}", e.what());
    }
  }
}

// --- sessions ------------------------------------------------------------------------

CloudService::Session* CloudService::live_session_locked(const std::string& sid, std::int64_t now) {
  auto it = sessions_.find(sid);
  if (it == sessions_.end()) return nullptr;
  if (now > it->second.deadline_ms) {
    close_session_locked(sid);
    return nullptr;
  }
  it->second.deadline_ms = now + config_.heartbeat_timeout_ms;
  return &it->second;
}

void CloudService::close_session_locked(const std::string& sid) {
  auto it = sessions_.find(sid);
  if (it == sessions_.end()) return;
  auto dev = device_session_.find(it->second.device_id);
  if (dev != device_session_.end() && dev->second == sid) device_session_.erase(dev);
  sessions_.erase(it);
}

void CloudService::close_session(const std::string& sid) {
  std::lock_guard lock(mutex_);
  close_session_locked(sid);
}

std::size_t CloudService::reap_expired_sessions() {
  std::lock_guard lock(mutex_);
  const std::int64_t now = clock_();
  std::vector<std::string> expired;
  for (const auto& [sid, session] : sessions_) {
    if (now > session.deadline_ms) expired.push_back(sid);
  }
  for (const auto& sid : expired) close_session_locked(sid);
  return expired.size();
}

protocol::Message CloudService::handshake(const protocol::Hello& hello, const PushSink& push) {
  const DeviceDescriptor& device = hello.device;
  if (device.device_id.empty()) return protocol::Err{std::nullopt, "bad_hello", "device_id must be non-empty"};
  if (device.resource_inventory.empty()) return protocol::Err{std::nullopt, "bad_hello", "empty resource inventory"};

  std::lock_guard lock(mutex_);
  const std::int64_t now = clock_();
  if (auto prior = device_session_.find(device.device_id); prior != device_session_.end()) {
    close_session_locked(prior->second);
  }
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[40];
  std::snprintf(buf, sizeof buf, "s%06llx-%012llx", static_cast<unsigned long long>(next_sid_++),
                static_cast<unsigned long long>(rng() & 0xFFFFFFFFFFFFULL));
  Session session{buf, device.device_id, 0, now + config_.heartbeat_timeout_ms, push};

  DeviceRecord& rec = device_record(state_, device.device_id);
  if (!(rec.descriptor == device)) {
    rec.descriptor = device;
    log_locked({{LogKind::kDevice, json::to_json(device)}}, now);
  }
  auto policy = policies_.active();
  session.policy_version_acked = policy->version();
  device_session_[device.device_id] = session.sid;
  const std::string sid = session.sid;
  sessions_.emplace(sid, std::move(session));
  return protocol::HelloAck{sid, policy->version(), *policy, rec.last_seq};
}

protocol::Message CloudService::heartbeat(const protocol::Heartbeat& hb) {
  std::lock_guard lock(mutex_);
  if (live_session_locked(hb.sid, clock_()) == nullptr) {
    return protocol::Err{hb.sid, "no_session", "unknown or expired session"};
  }
  return protocol::HeartbeatAck{hb.sid};
}

void CloudService::policy_ack(const protocol::PolicyAck& ack) {
  std::lock_guard lock(mutex_);
  if (Session* s = live_session_locked(ack.sid, clock_())) {
    s->policy_version_acked = std::max(s->policy_version_acked, ack.version);
  }
}

protocol::Message CloudService::process_event_batch(const protocol::Events& batch) {
  std::lock_guard lock(mutex_);
  const std::int64_t now = clock_();
  Session* session = live_session_locked(batch.sid, now);
  if (session == nullptr) return protocol::Err{batch.sid, "no_session", "unknown or expired session"};
  DeviceRecord& dev = device_record(state_, session->device_id);

  // Validate the whole batch before touching any state.
  for (std::size_t i = 1; i < batch.events.size(); ++i) {
    if (batch.events[i].event_seq <= batch.events[i - 1].event_seq) {
      return protocol::Err{batch.sid, "bad_batch",
                           "event_seq " + std::to_string(batch.events[i].event_seq) + " follows " +
                               std::to_string(batch.events[i - 1].event_seq)};
    }
  }
  std::vector<bool> duplicate(batch.events.size(), false);
  for (std::size_t i = 0; i < batch.events.size(); ++i) {
    const AccessEvent& e = batch.events[i];
    try {
      duplicate[i] = validate_event(e, dev.descriptor, dev.last_seq).duplicate;
    } catch (const InventoryMismatch& err) {
      return protocol::Err{batch.sid, "inventory_mismatch", err.what()};
    } catch (const MalformedEvent& err) {
      return protocol::Err{batch.sid, "malformed_event", err.what()};
    }
    if (duplicate[i] && !decision_index_.contains({e.device_id, e.event_seq})) {
      return protocol::Err{batch.sid, "unknown_event",
                           "event_seq " + std::to_string(e.event_seq) + " is at or below last_seq " +
                               std::to_string(dev.last_seq) + " but was never decided"};
    }
  }

  // One policy snapshot per batch: decisions in a reply never mix versions.
  const auto policy = policies_.active();
  protocol::Decisions reply{batch.sid, {}};
  reply.decisions.reserve(batch.events.size());
  for (std::size_t i = 0; i < batch.events.size(); ++i) {
    const AccessEvent& e = batch.events[i];
    if (duplicate[i]) {
      reply.decisions.push_back(state_.decisions[decision_index_.at({e.device_id, e.event_seq})]);
      continue;
    }
    const std::uint64_t threat_id = state_.threats.size() + 1;
    PipelineOutcome out = state_.pipeline.process(e, *policy, threat_id, now);

    std::vector<std::pair<LogKind, Json>> group;
    group.emplace_back(LogKind::kEvent, json::to_json(e));
    group.emplace_back(LogKind::kDecision, json::to_json(out.decision));
    if (out.threat) group.emplace_back(LogKind::kThreat, json::to_json(*out.threat));
    if (out.quarantined) group.emplace_back(LogKind::kQuarantine, quarantine_payload(e.device_id, e.app_id, "add"));
    log_locked(group, now);

    state_.events.push_back(e);
    decision_index_[{e.device_id, e.event_seq}] = state_.decisions.size();
    state_.decisions.push_back(out.decision);
    if (out.threat) state_.threats.push_back(std::move(*out.threat));
    dev.last_seq = e.event_seq;
    reply.decisions.push_back(std::move(out.decision));
  }
  maybe_snapshot_locked();
  return reply;
}

std::vector<protocol::Message> CloudService::handle_message(const protocol::Message& msg, const PushSink& push) {
  using namespace protocol;
  std::vector<Message> replies;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          replies.push_back(handshake(m, push));
        } else if constexpr (std::is_same_v<T, Events>) {
          replies.push_back(process_event_batch(m));
        } else if constexpr (std::is_same_v<T, Heartbeat>) {
          replies.push_back(heartbeat(m));
        } else if constexpr (std::is_same_v<T, PolicyAck>) {
          policy_ack(m);
        } else if constexpr (std::is_same_v<T, Bye>) {
          close_session(m.sid);
        } else {
          replies.push_back(Err{std::nullopt, "unexpected_message",
                                "'" + std::string(type_tag(msg)) + "' is not accepted by the server"});
        }
      },
      msg);
  return replies;
}

// --- admin ---------------------------------------------------------------------------

std::vector<CloudService::PendingPush> CloudService::on_policy_change_locked(
    const std::shared_ptr<const PolicySet>& set, std::string_view reason, std::int64_t now) {
  log_locked({{LogKind::kPolicyChange, policy_change_payload(*set, reason)}}, now);
  maybe_snapshot_locked();
  std::vector<PendingPush> pushes;
  for (const auto& [sid, session] : sessions_) {
    if (session.push) pushes.emplace_back(session.push, protocol::PolicyUpdate{sid, set->version(), *set});
  }
  return pushes;
}

std::uint64_t CloudService::put_policy(std::string_view document) {
  std::vector<PendingPush> pushes;
  std::uint64_t version = 0;
  {
    std::lock_guard lock(mutex_);
    auto set = policies_.update(document);
    version = set->version();
    pushes = on_policy_change_locked(set, "put", clock_());
  }
  deliver(std::move(pushes));
  return version;
}

std::uint64_t CloudService::set_permission(const std::string& device_id, const std::string& app_id,
                                           std::string_view resource, RuleDecision decision,
                                           std::optional<Constraints> constraints) {
  const Resource r = parse_resource(resource);
  if (device_id.empty()) throw InvalidRule("device_id must be non-empty");
  if (!is_valid_app_id(app_id)) throw InvalidRule("invalid app id '" + app_id + "'");

  PolicyRule rule;
  rule.id = "user:" + device_id + ":" + app_id + ":" + std::string(to_string(r));
  rule.priority = 10'000;
  rule.app = AppSelector::parse(app_id);
  rule.resource = ResourceSelector::exact(r);
  rule.when.device = device_id;
  rule.decision = decision;
  if (decision == RuleDecision::kSelective) rule.constraints = constraints.value_or(Constraints{});
  check_rule(rule);

  std::vector<PendingPush> pushes;
  std::uint64_t version = 0;
  {
    std::lock_guard lock(mutex_);
    auto set = policies_.modify([&](std::vector<PolicyRule>& rules, PolicyDefaults&) {
      std::erase_if(rules, [&](const PolicyRule& existing) { return existing.id == rule.id; });
      rules.push_back(rule);
    });
    version = set->version();
    pushes = on_policy_change_locked(set, "permission", clock_());
  }
  deliver(std::move(pushes));
  return version;
}

bool CloudService::lift_quarantine(const std::string& device_id, const std::string& app_id) {
  std::lock_guard lock(mutex_);
  if (!state_.pipeline.lift_quarantine(device_id, app_id)) return false;
  log_locked({{LogKind::kQuarantine, quarantine_payload(device_id, app_id, "lift")}}, clock_());
  return true;
}

namespace {

template <typename T>
Page<T> page_of(const std::vector<T>& items, std::uint64_t since, std::size_t limit) {
  Page<T> page;
  page.cursor = since;
  for (std::uint64_t pos = since + 1; pos <= items.size() && page.items.size() < limit; ++pos) {
    page.items.push_back(items[pos - 1]);
    page.cursor = pos;
  }
  return page;
}

}  // namespace

Page<ThreatReport> CloudService::list_threat_feed(std::uint64_t since, std::size_t limit) const {
  std::lock_guard lock(mutex_);
  return page_of(state_.threats, since, limit);
}

Page<Decision> CloudService::list_decisions(std::uint64_t since, std::size_t limit) const {
  std::lock_guard lock(mutex_);
  return page_of(state_.decisions, since, limit);
}

Page<AccessEvent> CloudService::list_device_events(const std::string& device_id, std::uint64_t since,
                                                   std::size_t limit) const {
  std::lock_guard lock(mutex_);
  Page<AccessEvent> page;
  page.cursor = since;
  for (std::uint64_t pos = since + 1; pos <= state_.events.size() && page.items.size() < limit; ++pos) {
    const AccessEvent& e = state_.events[pos - 1];
    if (e.device_id != device_id) continue;
    page.items.push_back(e);
    page.cursor = pos;
  }
  return page;
}

std::vector<DeviceInfo> CloudService::devices() const {
  std::lock_guard lock(mutex_);
  std::vector<DeviceInfo> out;
  for (const auto& [id, rec] : state_.devices) {
    DeviceInfo info{rec.descriptor, rec.last_seq, false, std::nullopt, 0};
    if (auto it = device_session_.find(id); it != device_session_.end()) {
      info.connected = true;
      info.sid = it->second;
      info.policy_version_acked = sessions_.at(it->second).policy_version_acked;
    }
    out.push_back(std::move(info));
  }
  return out;
}

void CloudService::record_trial(Json report) {
  std::lock_guard lock(mutex_);
  trials_.push_back(std::move(report));
}

std::vector<Json> CloudService::trials() const {
  std::lock_guard lock(mutex_);
  return trials_;
}

std::vector<Decision> CloudService::decisions() const {
  std::lock_guard lock(mutex_);
  return state_.decisions;
}

std::vector<ThreatReport> CloudService::threats() const {
  std::lock_guard lock(mutex_);
  return state_.threats;
}

std::optional<Decision> CloudService::stored_decision(const std::string& device_id, std::uint64_t event_seq) const {
  std::lock_guard lock(mutex_);
  auto it = decision_index_.find({device_id, event_seq});
  if (it == decision_index_.end()) return std::nullopt;
  return state_.decisions[it->second];
}

bool CloudService::is_quarantined(const std::string& device_id, const std::string& app_id) const {
  std::lock_guard lock(mutex_);
  return state_.pipeline.is_quarantined(device_id, app_id);
}

}  // namespace seaas
