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

#include "seaas/detection.hpp"

#include <algorithm>

#include "seaas/errors.hpp"

namespace seaas {

std::string_view to_string(MitigationKind k) noexcept {
  switch (k) {
    case MitigationKind::kNone: return "NONE";
    case MitigationKind::kBlock: return "BLOCK";
    case MitigationKind::kRateLimit: return "RATE_LIMIT";
    case MitigationKind::kRevokePermission: return "REVOKE_PERMISSION";
    case MitigationKind::kQuarantineApp: return "QUARANTINE_APP";
  }
  return "NONE";
}

MitigationKind parse_mitigation_kind(std::string_view name) {
  for (auto k : {MitigationKind::kNone, MitigationKind::kBlock, MitigationKind::kRateLimit,
                 MitigationKind::kRevokePermission, MitigationKind::kQuarantineApp}) {
    if (to_string(k) == name) return k;
  }
  throw MalformedMessage("unknown mitigation kind '" + std::string(name) + "'");
}

std::string_view to_string(ThreatType t) noexcept {
  switch (t) {
    case ThreatType::kPolicyViolation: return "POLICY_VIOLATION";
    case ThreatType::kAnomalousFrequency: return "ANOMALOUS_FREQUENCY";
    case ThreatType::kBackgroundExfiltration: return "BACKGROUND_EXFILTRATION";
  }
  return "POLICY_VIOLATION";
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::kLow: return "LOW";
    case Severity::kMedium: return "MEDIUM";
    case Severity::kHigh: return "HIGH";
  }
  return "LOW";
}

std::string_view to_string(ThreatStatus s) noexcept {
  return s == ThreatStatus::kDetected ? "DETECTED" : "MITIGATED";
}

ThreatType parse_threat_type(std::string_view name) {
  for (auto t : {ThreatType::kPolicyViolation, ThreatType::kAnomalousFrequency,
                 ThreatType::kBackgroundExfiltration}) {
    if (to_string(t) == name) return t;
  }
  throw MalformedMessage("unknown threat type '" + std::string(name) + "'");
}

Severity parse_severity(std::string_view name) {
  for (auto s : {Severity::kLow, Severity::kMedium, Severity::kHigh}) {
    if (to_string(s) == name) return s;
  }
  throw MalformedMessage("unknown severity '" + std::string(name) + "'");
}

ThreatStatus parse_threat_status(std::string_view name) {
  if (name == "DETECTED") return ThreatStatus::kDetected;
  if (name == "MITIGATED") return ThreatStatus::kMitigated;
  throw MalformedMessage("unknown threat status '" + std::string(name) + "'");
}

Severity severity_of(ThreatType t) noexcept {
  return t == ThreatType::kAnomalousFrequency ? Severity::kMedium : Severity::kHigh;
}

// --- windows -----------------------------------------------------------------

void WindowState::record(std::int64_t at_ms) {
  // Per-device order is guaranteed upstream; a late timestamp is still
  // inserted in place so the ring stays sorted.
  timestamps_.insert(std::upper_bound(timestamps_.begin(), timestamps_.end(), at_ms), at_ms);
  const std::int64_t cutoff = timestamps_.back() - horizon_ms_;
  while (!timestamps_.empty() && timestamps_.front() <= cutoff) timestamps_.pop_front();
}

std::uint64_t WindowState::count_within(std::int64_t at_ms, std::int64_t window_ms) const {
  auto hi = std::upper_bound(timestamps_.begin(), timestamps_.end(), at_ms);
  auto lo = std::upper_bound(timestamps_.begin(), hi, at_ms - window_ms);
  return static_cast<std::uint64_t>(std::distance(lo, hi));
}

std::uint64_t monitor_update(WindowState& state, const AccessEvent& event,
                             std::uint32_t frequency_window_s) {
  state.record(event.at_ms);
  return state.count_within(event.at_ms, std::int64_t{frequency_window_s} * 1000);
}

// --- detection ---------------------------------------------------------------

namespace {

bool explicitly_allowed(const Decision& decision, const PolicySet& policy) {
  if (decision.verdict == Verdict::kDeny) return false;
  for (const auto& rule : policy.rules()) {
    if (rule.id == decision.matched_rule_id) return rule.decision != RuleDecision::kDeny;
  }
  return false;
}

}  // namespace

std::optional<ThreatReport> detect(const AccessEvent& event, const Decision& decision,
                                   std::uint64_t window_count, const PolicySet& policy,
                                   const DetectionConfig& config) {
  std::optional<ThreatType> type;
  if (decision.verdict == Verdict::kDeny && decision.matched_rule_id != kDefaultRuleId) {
    type = ThreatType::kPolicyViolation;
  } else if (window_count > config.anomaly_threshold) {
    type = ThreatType::kAnomalousFrequency;
  } else if (event.app_state == AppState::kBackground &&
             classify_criticality(event.resource) == Criticality::kCritical &&
             !explicitly_allowed(decision, policy)) {
    type = ThreatType::kBackgroundExfiltration;
  }
  if (!type) return std::nullopt;

  ThreatReport report;
  report.device_id = event.device_id;
  report.app_id = event.app_id;
  report.resource = event.resource;
  report.event_seqs = {event.event_seq};
  report.threat_type = *type;
  report.severity = severity_of(*type);
  report.status = ThreatStatus::kDetected;
  return report;
}

MitigationAction mitigate(const ThreatReport& threat, std::uint64_t history, const DetectionConfig& config) {
  switch (threat.threat_type) {
    case ThreatType::kPolicyViolation:
      return {MitigationKind::kBlock, std::nullopt};
    case ThreatType::kAnomalousFrequency:
      return {MitigationKind::kRateLimit, RateLimitParams{config.anomaly_threshold, config.frequency_window_s}};
    case ThreatType::kBackgroundExfiltration:
      if (history + 1 >= config.repeat_threshold) return {MitigationKind::kQuarantineApp, std::nullopt};
      return {MitigationKind::kRevokePermission, std::nullopt};
  }
  return {MitigationKind::kBlock, std::nullopt};
}

// --- pipeline ----------------------------------------------------------------

WindowState& DetectionPipeline::window_for(const AccessEvent& event) {
  WindowKey key{event.device_id, event.app_id, event.resource};
  auto it = windows_.find(key);
  if (it == windows_.end()) it = windows_.emplace(std::move(key), WindowState(config_.horizon_s)).first;
  return it->second;
}

std::vector<std::uint64_t> DetectionPipeline::rule_window_counts(const AccessEvent& event,
                                                                 const PolicySet& policy) const {
  std::vector<std::uint64_t> counts;
  if (policy.max_window_s() == 0) return counts;
  auto it = windows_.find(WindowKey{event.device_id, event.app_id, event.resource});
  if (it == windows_.end()) return counts;
  counts.assign(policy.rules().size(), 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (const auto& w = policy.rules()[i].when.max_per_window) {
      counts[i] = it->second.count_within(event.at_ms, std::int64_t{w->window_s} * 1000);
    }
  }
  return counts;
}

PipelineOutcome DetectionPipeline::process(const AccessEvent& event, const PolicySet& policy,
                                           std::uint64_t threat_id, std::int64_t now_ms) {
  PipelineOutcome out;
  AppKey app_key{event.device_id, event.app_id};
  if (quarantine_.contains(app_key)) {
    out.decision.device_id = event.device_id;
    out.decision.event_seq = event.event_seq;
    out.decision.verdict = Verdict::kDeny;
    out.decision.matched_rule_id = std::string(kQuarantineRuleId);
    out.decision.policy_version = policy.version();
  } else {
    // Counts for rule predicates exclude the event being decided.
    const auto counts = rule_window_counts(event, policy);
    out.decision = evaluate(policy, event, counts);
  }
  out.window_count = monitor_update(window_for(event), event, config_.frequency_window_s);

  auto threat = detect(event, out.decision, out.window_count, policy, config_);
  if (!threat) return out;

  std::uint64_t& history = high_history_[app_key];
  threat->threat_id = threat_id;
  threat->detected_at_ms = now_ms;
  threat->mitigation = mitigate(*threat, history, config_);
  threat->status = ThreatStatus::kMitigated;
  if (threat->severity == Severity::kHigh) ++history;
  if (threat->mitigation.kind == MitigationKind::kQuarantineApp) {
    quarantine_.insert(app_key);
    out.quarantined = true;
  }
  out.decision.mitigation = threat->mitigation;
  out.threat = std::move(threat);
  return out;
}

void DetectionPipeline::replay_event(const AccessEvent& event) { window_for(event).record(event.at_ms); }

void DetectionPipeline::replay_threat(const ThreatReport& threat) {
  if (threat.severity == Severity::kHigh) ++high_history_[AppKey{threat.device_id, threat.app_id}];
}

void DetectionPipeline::quarantine(const std::string& device_id, const std::string& app_id) {
  quarantine_.insert(AppKey{device_id, app_id});
}

bool DetectionPipeline::lift_quarantine(const std::string& device_id, const std::string& app_id) {
  AppKey key{device_id, app_id};
  if (quarantine_.erase(key) == 0) return false;
  // A lifted app starts over; otherwise its next HIGH threat re-quarantines.
  high_history_.erase(key);
  return true;
}

bool DetectionPipeline::is_quarantined(const std::string& device_id, const std::string& app_id) const {
  return quarantine_.contains(AppKey{device_id, app_id});
}

std::vector<std::pair<std::string, std::string>> DetectionPipeline::quarantined() const {
  return {quarantine_.begin(), quarantine_.end()};
}

std::uint64_t DetectionPipeline::high_history(const std::string& device_id, const std::string& app_id) const {
  auto it = high_history_.find(AppKey{device_id, app_id});
  return it == high_history_.end() ? 0 : it->second;
}

void DetectionPipeline::set_high_history(const std::string& device_id, const std::string& app_id,
                                         std::uint64_t count) {
  high_history_[AppKey{device_id, app_id}] = count;
}

}  // namespace seaas
