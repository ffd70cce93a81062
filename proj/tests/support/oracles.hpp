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

// Independent reference implementations used as test oracles. They share
// no logic with the library beyond its data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "seaas/policy.hpp"

namespace oracle {

inline bool is_critical(seaas::Resource r) {
  static const std::set<std::string> kCritical = {"MICROPHONE", "GPS",    "CAMERA",   "CONTACTS",
                                                  "PHOTOS",     "SMS",    "CALL_LOG", "DEVICE_IDENTITY"};
  return kCritical.contains(std::string(seaas::to_string(r)));
}

inline bool is_hardware(seaas::Resource r) {
  static const std::set<std::string> kHardware = {"MICROPHONE", "GPS",        "CAMERA",         "ACCELEROMETER",
                                                  "GYROSCOPE",  "WIFI_RADIO", "DEVICE_IDENTITY"};
  return kHardware.contains(std::string(seaas::to_string(r)));
}

inline bool app_matches(const std::string& sel, const std::string& app) {
  if (sel == "*") return true;
  if (sel.back() == '*') return app.rfind(sel.substr(0, sel.size() - 1), 0) == 0;
  return sel == app;
}

inline int app_score(const std::string& sel) { return sel == "*" ? 0 : sel.back() == '*' ? 2 : 4; }

inline bool resource_matches(const std::string& sel, seaas::Resource r) {
  if (sel == "*") return true;
  if (sel == "category:HARDWARE") return is_hardware(r);
  if (sel == "category:SOFTWARE") return !is_hardware(r);
  return sel == seaas::to_string(r);
}

inline int resource_score(const std::string& sel) { return sel == "*" ? 0 : sel.rfind("category:", 0) == 0 ? 2 : 4; }

inline bool in_time_window(const seaas::TimeWindow& w, std::int64_t at_ms) {
  const std::int64_t day = 86'400'000;
  std::int64_t t = at_ms % day;
  if (t < 0) t += day;
  if (w.start_ms <= w.end_ms) return w.start_ms <= t && t < w.end_ms;
  return t >= w.start_ms || t < w.end_ms;
}

inline int spec_score(const seaas::PolicyRule& r) {
  int s = app_score(r.app.to_string()) + resource_score(r.resource.to_string()) + (r.action.to_string() == "*" ? 0 : 1);
  s += r.when.app_state.has_value();
  s += r.when.time_window.has_value();
  s += r.when.max_per_window.has_value();
  s += r.when.device.has_value();
  return s;
}

inline bool matches(const seaas::PolicyRule& r, const seaas::AccessEvent& e, std::uint64_t count) {
  if (!app_matches(r.app.to_string(), e.app_id)) return false;
  if (!resource_matches(r.resource.to_string(), e.resource)) return false;
  const auto action = r.action.to_string();
  if (action != "*" && action != seaas::to_string(e.action)) return false;
  if (r.when.app_state && *r.when.app_state != e.app_state) return false;
  if (r.when.time_window && !in_time_window(*r.when.time_window, e.at_ms)) return false;
  if (r.when.max_per_window && !(count < r.when.max_per_window->count)) return false;
  if (r.when.device && *r.when.device != e.device_id) return false;
  return true;
}

/// Linear scan over every rule; the winner minimizes (-priority, -specificity, id).
inline seaas::Decision evaluate(const seaas::PolicySet& set, const seaas::AccessEvent& e,
                                const std::vector<std::uint64_t>& counts) {
  const auto& rules = set.rules();
  std::optional<std::size_t> best;
  auto key = [&](std::size_t i) { return std::make_tuple(-rules[i].priority, -spec_score(rules[i]), rules[i].id); };
  for (std::size_t i = rules.size(); i-- > 0;) {
    const std::uint64_t c = counts.empty() ? 0 : counts[i];
    if (!matches(rules[i], e, c)) continue;
    if (!best || key(i) < key(*best)) best = i;
  }
  seaas::Decision d;
  d.device_id = e.device_id;
  d.event_seq = e.event_seq;
  d.policy_version = set.version();
  if (!best) {
    const auto def = is_critical(e.resource) ? set.defaults().critical : set.defaults().normal;
    d.verdict = def == seaas::RuleDecision::kDeny ? seaas::Verdict::kDeny : seaas::Verdict::kAllow;
    d.matched_rule_id = "DEFAULT";
    return d;
  }
  const auto& r = rules[*best];
  d.matched_rule_id = r.id;
  switch (r.decision) {
    case seaas::RuleDecision::kGrant: d.verdict = seaas::Verdict::kAllow; break;
    case seaas::RuleDecision::kDeny: d.verdict = seaas::Verdict::kDeny; break;
    case seaas::RuleDecision::kSelective:
      d.verdict = seaas::Verdict::kAllowConstrained;
      d.constraints_applied = r.constraints;
      break;
  }
  return d;
}

/// Timestamps t in the full history with at - window < t <= at.
inline std::uint64_t window_count(const std::vector<std::int64_t>& history, std::int64_t at_ms, std::int64_t window_ms) {
  return static_cast<std::uint64_t>(
      std::count_if(history.begin(), history.end(), [&](std::int64_t t) { return t > at_ms - window_ms && t <= at_ms; }));
}

inline std::uint64_t evaluate_cost(std::size_t rules) {
  return 4 + static_cast<std::uint64_t>(std::ceil(static_cast<double>(rules) / 4.0));
}

}  // namespace oracle
