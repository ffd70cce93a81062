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

#include "seaas/agent.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "seaas/errors.hpp"
#include "seaas/transport.hpp"

namespace seaas {

std::string_view to_string(AgentMode m) noexcept { return m == AgentMode::kLocal ? "LOCAL" : "OFFLOADED"; }

AgentMode parse_agent_mode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "local") return AgentMode::kLocal;
  if (lower == "offloaded") return AgentMode::kOffloaded;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(ScenarioLabel l) noexcept {
  switch (l) {
    case ScenarioLabel::kBenign: return "benign";
    case ScenarioLabel::kPolicyViolation: return "threat:POLICY_VIOLATION";
    case ScenarioLabel::kAnomalousFrequency: return "threat:ANOMALOUS_FREQUENCY";
    case ScenarioLabel::kBackgroundExfiltration: return "threat:BACKGROUND_EXFILTRATION";
  }
  return "benign";
}

ScenarioLabel parse_scenario_label(std::string_view text) {
  for (auto l : {ScenarioLabel::kBenign, ScenarioLabel::kPolicyViolation, ScenarioLabel::kAnomalousFrequency,
                 ScenarioLabel::kBackgroundExfiltration}) {
    if (to_string(l) == text) return l;
  }
  throw ScenarioError("unknown label '" + std::string(text) + "'");
}

// --- scripts ----------------------------------------------------------------------------

namespace {

constexpr std::string_view kScriptKeys[] = {"at_ms", "app", "resource", "action", "app_state", "payload_bytes",
                                            "label"};

ScriptedEvent scripted_from_json(const json::Json& j) {
  if (!j.is_object()) throw ScenarioError("expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kScriptKeys), std::end(kScriptKeys), key) == std::end(kScriptKeys)) {
      throw ScenarioError("unknown field '" + key + "'");
    }
  }
  ScriptedEvent e;
  try {
    e.at_ms = json::get_i64(j, "at_ms");
    e.app = json::get_string(j, "app");
    e.resource = parse_resource(json::get_string(j, "resource"));
    e.action = parse_action(json::get_string(j, "action"));
    e.app_state = parse_app_state(json::get_string(j, "app_state"));
    e.payload_bytes = j.contains("payload_bytes") ? json::get_u64(j, "payload_bytes") : 0;
    e.label = j.contains("label") ? parse_scenario_label(json::get_string(j, "label")) : ScenarioLabel::kBenign;
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& err) {
    throw ScenarioError(err.what());
  }
  if (!is_valid_app_id(e.app)) throw ScenarioError("invalid app id '" + e.app + "'");
  return e;
}

json::Json scripted_to_json(const ScriptedEvent& e) {
  return json::Json{{"at_ms", e.at_ms},
                    {"app", e.app},
                    {"resource", to_string(e.resource)},
                    {"action", to_string(e.action)},
                    {"app_state", to_string(e.app_state)},
                    {"payload_bytes", e.payload_bytes},
                    {"label", to_string(e.label)}};
}

}  // namespace

ScenarioScript parse_scenario(std::string_view text) {
  ScenarioScript script;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = json::Json::parse(line);
      script.events.push_back(scripted_from_json(j));
    } catch (const json::Json::exception& err) {
      throw ScenarioError("line " + std::to_string(line_no) + ": " + err.what());
    } catch (const ScenarioError& err) {
      throw ScenarioError("line " + std::to_string(line_no) + ": " + err.what());
    }
    const auto& events = script.events;
    if (events.size() > 1 && events.back().at_ms < events[events.size() - 2].at_ms) {
      throw ScenarioError("line " + std::to_string(line_no) + ": at_ms goes backwards");
    }
  }
  return script;
}

ScenarioScript load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string serialize_scenario(const ScenarioScript& script) {
  std::string out;
  for (const auto& e : script.events) {
    out += scripted_to_json(e).dump();
    out += '\n';
  }
  return out;
}

void check_scenario(const ScenarioScript& script, const DeviceDescriptor& device) {
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    const auto& e = script.events[i];
    const auto where = "event " + std::to_string(i + 1) + ": ";
    if (i > 0 && e.at_ms < script.events[i - 1].at_ms) throw ScenarioError(where + "at_ms goes backwards");
    if (!is_valid_app_id(e.app)) throw ScenarioError(where + "invalid app id");
    if (!device.resource_inventory.contains(e.resource)) {
      throw ScenarioError(where + std::string(to_string(e.resource)) + " not in the device inventory");
    }
  }
}

// --- work -------------------------------------------------------------------------------

std::string_view to_string(WorkCategory c) noexcept {
  switch (c) {
    case WorkCategory::kGenerate: return "generate";
    case WorkCategory::kEvaluate: return "evaluate";
    case WorkCategory::kWindow: return "window";
    case WorkCategory::kEncode: return "encode";
    case WorkCategory::kApply: return "apply";
  }
  return "generate";
}

WorkCategory parse_work_category(std::string_view name) {
  for (auto c : {WorkCategory::kGenerate, WorkCategory::kEvaluate, WorkCategory::kWindow, WorkCategory::kEncode,
                 WorkCategory::kApply}) {
    if (to_string(c) == name) return c;
  }
  throw LedgerError("unknown work category '" + std::string(name) + "'");
}

std::uint64_t work_cost(WorkCategory step, std::size_t rules_count) noexcept {
  switch (step) {
    case WorkCategory::kGenerate: return 1;
    case WorkCategory::kEvaluate: return 4 + (rules_count + 3) / 4;
    case WorkCategory::kWindow: return 2;
    case WorkCategory::kEncode: return 2;
    case WorkCategory::kApply: return 1;
  }
  return 0;
}

WorkLedger account_work(WorkLedger ledger, WorkCategory step, std::size_t rules_count) {
  const auto cost = work_cost(step, rules_count);
  ledger.total += cost;
  ledger.by_category[static_cast<std::size_t>(step)] += cost;
  return ledger;
}

WorkLedger account_work(WorkLedger ledger, std::string_view step, std::size_t rules_count) {
  return account_work(ledger, parse_work_category(step), rules_count);
}

// --- fallback ---------------------------------------------------------------------------

void FallbackCache::remember(const AccessEvent& event, const Decision& decision) {
  decisions_.insert_or_assign(Key{event.app_id, event.resource, event.action, event.app_state}, decision);
}

const Decision* FallbackCache::lookup(const AccessEvent& event) const {
  auto it = decisions_.find(Key{event.app_id, event.resource, event.action, event.app_state});
  return it == decisions_.end() ? nullptr : &it->second;
}

Decision fallback_decision(const AccessEvent& event, const FallbackCache& cache) {
  Decision d;
  if (const Decision* cached = cache.lookup(event)) {
    d = *cached;
    d.mitigation.reset();
    d.stale = true;
  } else {
    d.verdict = classify_criticality(event.resource) == Criticality::kCritical ? Verdict::kDeny : Verdict::kAllow;
    d.matched_rule_id = std::string(kFallbackRuleId);
    d.policy_version = cache.policy() ? cache.policy()->version() : 0;
  }
  d.device_id = event.device_id;
  d.event_seq = event.event_seq;
  return d;
}

// --- runs -------------------------------------------------------------------------------

json::Json to_json(const AgentRunReport& r) {
  json::Json work{{"total", r.work.total}};
  for (std::size_t i = 0; i < kWorkCategoryCount; ++i) {
    work[std::string(to_string(static_cast<WorkCategory>(i)))] = r.work.by_category[i];
  }
  json::Json outcomes = json::Json::array();
  for (const auto& o : r.outcomes) {
    json::Json entry = json::to_json(o.decision);
    entry["pre_blocked"] = o.pre_blocked;
    entry["fallback"] = o.fallback;
    outcomes.push_back(std::move(entry));
  }
  return json::Json{{"device_id", r.device_id},
                    {"mode", to_string(r.mode)},
                    {"events_emitted", r.events_emitted},
                    {"decisions",
                     {{"ALLOW", r.allowed}, {"DENY", r.denied}, {"ALLOW_CONSTRAINED", r.constrained}}},
                    {"pre_blocked", r.pre_blocked},
                    {"fallbacks", r.fallbacks},
                    {"stale", r.stale},
                    {"policy_version", r.policy_version},
                    {"work", std::move(work)},
                    {"outcomes", std::move(outcomes)}};
}

namespace {

using Clock = std::chrono::steady_clock;

// Enforcement state built from applied decisions.
class Enforcer {
 public:
  std::optional<Decision> blocking(const AccessEvent& e) const {
    if (auto it = apps_.find(e.app_id); it != apps_.end()) return it->second;
    if (auto it = resources_.find({e.app_id, e.resource}); it != resources_.end()) return it->second;
    if (auto it = exact_.find({e.app_id, e.resource, e.action, e.app_state}); it != exact_.end()) return it->second;
    return std::nullopt;
  }

  void learn(const AccessEvent& e, const Decision& d) {
    Decision block = d;
    block.mitigation.reset();
    block.verdict = Verdict::kDeny;
    block.constraints_applied.reset();
    const bool quarantine = d.matched_rule_id == kQuarantineRuleId ||
                            (d.mitigation && d.mitigation->kind == MitigationKind::kQuarantineApp);
    if (quarantine) {
      apps_.emplace(e.app_id, block);
    } else if (d.mitigation && d.mitigation->kind == MitigationKind::kRevokePermission) {
      resources_.emplace(std::pair{e.app_id, e.resource}, block);
    } else if (d.verdict == Verdict::kDeny) {
      exact_.emplace(FallbackCache::Key{e.app_id, e.resource, e.action, e.app_state}, block);
    }
  }

 private:
  std::map<std::string, Decision> apps_;
  std::map<std::pair<std::string, Resource>, Decision> resources_;
  std::map<FallbackCache::Key, Decision> exact_;
};

class Runner {
 public:
  Runner(const ScenarioScript& script, AgentMode mode, Transport* transport, const PolicySet& policy,
         const AgentConfig& config)
      : script_(script), mode_(mode), transport_(transport), policy_(policy), config_(config),
        pipeline_(config.detection) {
    report_.device_id = config.device.device_id;
    report_.mode = mode;
    report_.work.mode = mode;
    report_.outcomes.resize(script.events.size());
  }

  AgentRunReport run() {
    if (script_.events.empty()) return std::move(report_);
    if (mode_ == AgentMode::kLocal) {
      report_.policy_version = policy_.version();
      for (std::size_t i = 0; i < script_.events.size(); ++i) run_local(i);
    } else {
      if (transport_ == nullptr) throw TransportError("offloaded mode needs a transport");
      const bool up = open_session();
      seq_base_ = up ? ack_last_seq_ : 0;
      for (std::size_t i = 0; i < script_.events.size(); ++i) stage_offloaded(i);
      flush();
      if (sid_) {
        try {
          transport_->send(protocol::Bye{*sid_});
        } catch (const TransportError&) {
        }
        transport_->close();
      }
    }
    return std::move(report_);
  }

 private:
  AccessEvent make_event(std::size_t i) const {
    const auto& s = script_.events[i];
    return AccessEvent{seq_base_ + i + 1, config_.device.device_id, s.app, s.resource, s.action, s.app_state,
                       s.at_ms, s.payload_bytes};
  }

  void charge(WorkCategory c, std::size_t rules = 0) { report_.work = account_work(report_.work, c, rules); }

  void record(std::size_t i, const AccessEvent& e, Decision d, bool pre_blocked, bool fallback) {
    d.device_id = e.device_id;
    d.event_seq = e.event_seq;
    switch (d.verdict) {
      case Verdict::kAllow: ++report_.allowed; break;
      case Verdict::kDeny: ++report_.denied; break;
      case Verdict::kAllowConstrained: ++report_.constrained; break;
    }
    if (pre_blocked) ++report_.pre_blocked;
    if (fallback) ++report_.fallbacks;
    if (d.stale) ++report_.stale;
    if (!pre_blocked && !fallback) enforcer_.learn(e, d);
    report_.outcomes[i] = EventOutcome{e.event_seq, std::move(d), pre_blocked, fallback};
  }

  bool pre_block(std::size_t i, const AccessEvent& e) {
    auto block = enforcer_.blocking(e);
    if (!block) return false;
    charge(WorkCategory::kApply);
    record(i, e, std::move(*block), true, false);
    return true;
  }

  void run_local(std::size_t i) {
    const auto e = make_event(i);
    ++report_.events_emitted;
    charge(WorkCategory::kGenerate);
    if (pre_block(i, e)) return;
    const auto counts = pipeline_.rule_window_counts(e, policy_);
    Decision d = evaluate(policy_, e, counts);
    charge(WorkCategory::kEvaluate, policy_.rules().size());
    pipeline_.replay_event(e);
    charge(WorkCategory::kWindow);
    record(i, e, std::move(d), false, false);
  }

  void stage_offloaded(std::size_t i) {
    const auto e = make_event(i);
    ++report_.events_emitted;
    charge(WorkCategory::kGenerate);
    if (pre_block(i, e)) return;
    charge(WorkCategory::kEncode);
    pending_.push_back(i);
    if (pending_.size() >= config_.batch_size) flush();
  }

  // --- session handling ---

  bool open_session() {
    sid_.reset();
    try {
      transport_->connect();
      transport_->send(protocol::Hello{config_.device});
      last_send_ = Clock::now();
      auto reply = await([](const protocol::Message& m) { return std::holds_alternative<protocol::HelloAck>(m); });
      if (!reply) return drop();
      auto& ack = std::get<protocol::HelloAck>(*reply);
      sid_ = ack.sid;
      ack_last_seq_ = ack.last_seq;
      adopt_policy(std::move(ack.policy));
      return true;
    } catch (const TransportError&) {
      return drop();
    }
  }

  bool drop() {
    sid_.reset();
    transport_->close();
    return false;
  }

  void adopt_policy(PolicySet policy) {
    const auto version = policy.version();
    cache_.set_policy(std::move(policy));
    report_.policy_version = version;
    if (sid_) {
      transport_->send(protocol::PolicyAck{*sid_, version});
      last_send_ = Clock::now();
    }
  }

  // Reads until `want` matches, handling pushes on the way. Returns nullopt
  // on timeout or when the server reports the session gone.
  template <typename Pred>
  std::optional<protocol::Message> await(Pred want) {
    const auto deadline = Clock::now() + config_.decision_timeout;
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) return std::nullopt;
      auto msg = transport_->receive(left);
      if (!msg) return std::nullopt;
      if (want(*msg)) return msg;
      if (auto* update = std::get_if<protocol::PolicyUpdate>(&*msg)) {
        adopt_policy(std::move(update->policy));
      } else if (auto* err = std::get_if<protocol::Err>(&*msg)) {
        if (err->code == "no_session") return std::nullopt;
        throw ProtocolError("server rejected request: " + err->code + ": " + err->detail);
      }
    }
  }

  void maybe_heartbeat() {
    if (!sid_ || Clock::now() - last_send_ < config_.heartbeat_interval) return;
    transport_->send(protocol::Heartbeat{*sid_});
    last_send_ = Clock::now();
    await([](const protocol::Message& m) { return std::holds_alternative<protocol::HeartbeatAck>(m); });
  }

  std::optional<std::vector<Decision>> offload(const protocol::Events& batch) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (!sid_ && !open_session()) return std::nullopt;
      try {
        maybe_heartbeat();
        protocol::Events msg = batch;
        msg.sid = *sid_;
        transport_->send(msg);
        last_send_ = Clock::now();
        auto reply =
            await([](const protocol::Message& m) { return std::holds_alternative<protocol::Decisions>(m); });
        if (!reply) {
          drop();
          continue;
        }
        auto decisions = std::get<protocol::Decisions>(std::move(*reply)).decisions;
        if (decisions.size() != batch.events.size()) throw ProtocolError("decision count mismatch");
        return decisions;
      } catch (const TransportError&) {
        drop();
      }
    }
    return std::nullopt;
  }

  void flush() {
    if (pending_.empty()) return;
    protocol::Events batch;
    for (auto i : pending_) batch.events.push_back(make_event(i));
    auto decisions = offload(batch);
    for (std::size_t k = 0; k < pending_.size(); ++k) {
      const auto& e = batch.events[k];
      charge(WorkCategory::kApply);
      if (decisions) {
        Decision d = std::move((*decisions)[k]);
        cache_.remember(e, d);
        record(pending_[k], e, std::move(d), false, false);
      } else {
        record(pending_[k], e, fallback_decision(e, cache_), false, true);
      }
    }
    pending_.clear();
  }

  const ScenarioScript& script_;
  AgentMode mode_;
  Transport* transport_;
  const PolicySet& policy_;
  const AgentConfig& config_;
  DetectionPipeline pipeline_;
  AgentRunReport report_;
  Enforcer enforcer_;
  FallbackCache cache_;
  std::optional<std::string> sid_;
  std::uint64_t ack_last_seq_ = 0;
  std::uint64_t seq_base_ = 0;
  std::vector<std::size_t> pending_;
  Clock::time_point last_send_{};
};

}  // namespace

AgentRunReport run_scenario(const ScenarioScript& script, AgentMode mode, Transport* transport,
                            const PolicySet& policy, const AgentConfig& config) {
  check_scenario(script, config.device);
  if (config.batch_size == 0) throw ScenarioError("batch size must be positive");
  return Runner(script, mode, transport, policy, config).run();
}

}  // namespace seaas
