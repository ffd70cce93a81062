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

// Trial runner and metrics: replays labeled scenario suites through the
// agent in both modes, joins the cloud's threat reports against the labels
// and reports detection accuracy and device work.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seaas/agent.hpp"
#include "seaas/detection.hpp"
#include "seaas/json_codec.hpp"
#include "seaas/net.hpp"
#include "seaas/policy.hpp"

namespace seaas {

class CloudService;

struct UserScript {
  std::string name;  // e.g. "user_01"
  ScenarioScript script;
};

struct TrialConfig {
  std::uint32_t trial_id = 1;
  std::vector<UserScript> users;
  PolicySet policy;
  std::size_t agents = 1;  // concurrent agents
  std::uint64_t seed = 42;
  AgentConfig agent;       // device_id is assigned per user
  DetectionConfig detection;
  // Remote mode: run against a live server instead of an embedded one.
  std::optional<HostPort> server;
  std::optional<HostPort> admin;
};

struct TrialReport {
  std::uint32_t trial_id = 0;
  std::uint64_t events_total = 0;
  std::uint64_t threats_injected = 0;
  std::uint64_t detected = 0;
  std::uint64_t undetected = 0;
  std::uint64_t false_positives = 0;
  std::optional<double> detection_ratio;
  std::optional<double> detection_rate;
  std::uint64_t work_units_local = 0;
  std::uint64_t work_units_offloaded = 0;
  std::optional<double> work_ratio;
  std::size_t policy_rules = 0;

  friend bool operator==(const TrialReport&, const TrialReport&) = default;
};

json::Json to_json(const TrialReport& report);

/// "trial_<n>.<user>"; also usable as a URL path segment.
std::string trial_device_id(std::uint32_t trial_id, const std::string& user);

struct DetectionMetrics {
  std::optional<double> ratio;  // detected / undetected
  std::optional<double> rate;   // detected / (detected + undetected)
};

/// Throws MetricError on a negative count.
DetectionMetrics compute_detection_metrics(std::int64_t detected, std::int64_t undetected);

using LabelKey = std::pair<std::string, std::uint64_t>;  // (device_id, event_seq)

struct LabelJoin {
  std::uint64_t threats_injected = 0;
  std::uint64_t detected = 0;
  std::uint64_t undetected = 0;
  std::uint64_t false_positives = 0;
};

/// A labeled threat is detected iff some report covers its (device, seq);
/// a benign event covered by a report is a false positive. Throws
/// TrialInvalid when a report names an event with no label.
LabelJoin join_labels(const std::map<LabelKey, ScenarioLabel>& labels, const std::vector<ThreatReport>& threats);

/// Runs every user OFFLOADED against the server and LOCAL for the baseline.
/// Uses `service` as the embedded server when given, a fresh in-memory one
/// otherwise, or the remote server named in the config. Throws TrialAborted
/// when the server cannot be reached and TrialInvalid on a label mismatch.
TrialReport run_trial(const TrialConfig& config, CloudService* service = nullptr);

struct EfficiencyVerdict {
  double work_ratio = 0;
  double threshold = 0.25;
  bool threshold_applied = false;  // rule count at or above the gate
  bool pass = false;
};

/// Packs with at least `min_rules` rules must stay at or below `threshold`;
/// smaller packs only need offloaded < local. Throws ComparisonError when
/// the local baseline is zero.
EfficiencyVerdict compare_cpu_modes(const TrialReport& report, double threshold = 0.25,
                                    std::size_t min_rules = 64);

inline constexpr const char* kResultColumns[] = {
    "trial_id",  "events_total",  "threats_injected", "detected",          "undetected",           "false_positives",
    "detection_ratio", "detection_rate", "work_units_local", "work_units_offloaded", "work_ratio"};

/// Header plus one row per report; undefined ratios print as N/A.
std::string results_csv(const std::vector<TrialReport>& reports);
/// Throws ExportError when `reports` is empty or the file cannot be written.
void export_results(const std::vector<TrialReport>& reports, const std::filesystem::path& path);

/// Scripts of one `trial_<n>` directory, sorted by file name.
std::vector<UserScript> load_trial_dir(const std::filesystem::path& dir);
/// Every `trial_<n>` directory under `suite`, ordered by n. Throws TrialInvalid.
std::vector<std::pair<std::uint32_t, std::vector<UserScript>>> load_suite(const std::filesystem::path& suite);

}  // namespace seaas
