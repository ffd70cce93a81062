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

// Cloud-side threat pipeline: monitor per-(device, app, resource) access
// windows, detect threats from each decided event, and pick the mitigation.

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "seaas/mitigation.hpp"
#include "seaas/policy.hpp"
#include "seaas/resource.hpp"

namespace seaas {

struct DetectionConfig {
  std::uint32_t anomaly_threshold = 30;
  std::uint32_t frequency_window_s = 60;
  std::uint32_t horizon_s = 300;
  std::uint32_t repeat_threshold = 3;

  friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;
};

enum class ThreatType : std::uint8_t { kPolicyViolation, kAnomalousFrequency, kBackgroundExfiltration };
enum class Severity : std::uint8_t { kLow, kMedium, kHigh };
enum class ThreatStatus : std::uint8_t { kDetected, kMitigated };

std::string_view to_string(ThreatType t) noexcept;
std::string_view to_string(Severity s) noexcept;
std::string_view to_string(ThreatStatus s) noexcept;
ThreatType parse_threat_type(std::string_view name);
Severity parse_severity(std::string_view name);
ThreatStatus parse_threat_status(std::string_view name);

/// POLICY_VIOLATION and BACKGROUND_EXFILTRATION are HIGH, ANOMALOUS_FREQUENCY is MEDIUM.
Severity severity_of(ThreatType t) noexcept;

struct ThreatReport {
  std::uint64_t threat_id = 0;
  std::string device_id;
  std::string app_id;
  Resource resource = Resource::kMicrophone;
  std::vector<std::uint64_t> event_seqs;
  ThreatType threat_type = ThreatType::kPolicyViolation;
  Severity severity = Severity::kHigh;
  ThreatStatus status = ThreatStatus::kDetected;
  MitigationAction mitigation;
  std::int64_t detected_at_ms = 0;

  friend bool operator==(const ThreatReport&, const ThreatReport&) = default;
};

/// Sorted access timestamps for one (device, app, resource).
class WindowState {
 public:
  explicit WindowState(std::uint32_t horizon_s = 300) : horizon_ms_(std::int64_t{horizon_s} * 1000) {}

  /// Records `at_ms`, evicts entries at or beyond the horizon behind the
  /// latest timestamp.
  void record(std::int64_t at_ms);
  /// Timestamps t with at_ms - window_ms < t <= at_ms.
  std::uint64_t count_within(std::int64_t at_ms, std::int64_t window_ms) const;

  const std::deque<std::int64_t>& timestamps() const noexcept { return timestamps_; }
  std::int64_t horizon_ms() const noexcept { return horizon_ms_; }

 private:
  std::int64_t horizon_ms_;
  std::deque<std::int64_t> timestamps_;
};

/// Appends the event, evicts old entries and returns the number of accesses
/// in the trailing `frequency_window_s` including this one.
std::uint64_t monitor_update(WindowState& state, const AccessEvent& event,
                             std::uint32_t frequency_window_s = 60);

/// First matching trigger wins: rule DENY, then frequency above threshold,
/// then background access to a critical resource that no explicit GRANT or
/// SELECTIVE rule allowed.
std::optional<ThreatReport> detect(const AccessEvent& event, const Decision& decision,
                                   std::uint64_t window_count, const PolicySet& policy,
                                   const DetectionConfig& config = {});

/// `history` is the number of earlier HIGH threats for the event's (device, app).
MitigationAction mitigate(const ThreatReport& threat, std::uint64_t history,
                          const DetectionConfig& config = {});

struct PipelineOutcome {
  Decision decision;
  std::uint64_t window_count = 0;
  std::optional<ThreatReport> threat;  // already MITIGATED
  bool quarantined = false;            // app was quarantined by this event
};

/// Stateful pipeline for accepted events. Keeps windows, HIGH-threat
/// history and the quarantine set. Not thread-safe; callers serialize per
/// device or wrap it.
class DetectionPipeline {
 public:
  explicit DetectionPipeline(DetectionConfig config = {}) : config_(config) {}

  /// Monitor, evaluate, detect and mitigate one event. `threat_id` and
  /// `now_ms` stamp the report when one is produced.
  PipelineOutcome process(const AccessEvent& event, const PolicySet& policy, std::uint64_t threat_id,
                          std::int64_t now_ms);

  /// Per-rule prior-access counts for `event`, indexed like policy.rules().
  std::vector<std::uint64_t> rule_window_counts(const AccessEvent& event, const PolicySet& policy) const;

  // Replay hooks for recovery.
  void replay_event(const AccessEvent& event);
  void replay_threat(const ThreatReport& threat);
  void quarantine(const std::string& device_id, const std::string& app_id);
  /// Returns false when the pair was not quarantined.
  bool lift_quarantine(const std::string& device_id, const std::string& app_id);

  bool is_quarantined(const std::string& device_id, const std::string& app_id) const;
  std::vector<std::pair<std::string, std::string>> quarantined() const;
  std::uint64_t high_history(const std::string& device_id, const std::string& app_id) const;
  std::map<std::pair<std::string, std::string>, std::uint64_t> high_history_entries() const {
    return high_history_;
  }
  void set_high_history(const std::string& device_id, const std::string& app_id, std::uint64_t count);
  const DetectionConfig& config() const noexcept { return config_; }

 private:
  using WindowKey = std::tuple<std::string, std::string, Resource>;
  using AppKey = std::pair<std::string, std::string>;

  WindowState& window_for(const AccessEvent& event);

  DetectionConfig config_;
  std::map<WindowKey, WindowState> windows_;
  std::map<AppKey, std::uint64_t> high_history_;
  std::set<AppKey> quarantine_;
};

}  // namespace seaas
