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

// Random value generators for property tests. Pools are small so random
// rules and events collide often enough to exercise matching.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seaas/policy.hpp"
#include "seaas/protocol.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::int64_t between(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, int percent = 50) { return between(rng, 0, 99) < percent; }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(between(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

inline const std::vector<std::string>& apps() {
  static const std::vector<std::string> v = {"com.game.puzzle", "com.game.racer", "com.maps.nav",
                                             "com.social.chat", "com.gamers.hub", "org.notes"};
  return v;
}

inline const std::vector<std::string>& devices() {
  static const std::vector<std::string> v = {"dev-a", "dev-b", "dev-c"};
  return v;
}

inline seaas::Resource resource(Rng& rng) {
  return seaas::kAllResources[static_cast<std::size_t>(between(rng, 0, seaas::kResourceCount - 1))];
}

inline seaas::Action action(Rng& rng) { return seaas::kAllActions[static_cast<std::size_t>(between(rng, 0, 3))]; }

inline seaas::AppState state(Rng& rng) {
  return coin(rng) ? seaas::AppState::kForeground : seaas::AppState::kBackground;
}

inline seaas::RateWindow rate(Rng& rng) {
  return seaas::RateWindow{static_cast<std::uint32_t>(between(rng, 1, 10)),
                           static_cast<std::uint32_t>(between(rng, 1, 300))};
}

inline seaas::Constraints constraints(Rng& rng) {
  seaas::Constraints c;
  do {
    if (coin(rng)) c.max_per_window = rate(rng);
    c.foreground_only = coin(rng, 30);
    c.redact = coin(rng, 30);
  } while (c.empty());
  return c;
}

inline seaas::PolicyRule rule(Rng& rng, const std::string& id) {
  static const std::vector<std::string> app_sels = {"*", "com.game.*", "com.*", "com.maps.nav", "com.game.puzzle",
                                                    "org.notes", "com.social.*"};
  static const std::vector<std::string> res_sels = {"*", "category:HARDWARE", "category:SOFTWARE", "MICROPHONE",
                                                    "GPS", "CONTACTS", "ACCELEROMETER", "CAMERA"};
  seaas::PolicyRule r;
  r.id = id;
  r.priority = between(rng, -5, 12) * (coin(rng, 20) ? 100 : 1);
  r.app = seaas::AppSelector::parse(pick(rng, app_sels));
  r.resource = coin(rng, 60) ? seaas::ResourceSelector::parse(pick(rng, res_sels))
                             : seaas::ResourceSelector::exact(resource(rng));
  r.action = coin(rng) ? seaas::ActionSelector() : seaas::ActionSelector::exact(action(rng));
  if (coin(rng, 30)) r.when.app_state = state(rng);
  if (coin(rng, 20)) {
    std::int64_t start = between(rng, 0, seaas::kMsPerDay - 1);
    std::int64_t end = between(rng, 0, seaas::kMsPerDay);
    if (start == end) end = (end + 1) % seaas::kMsPerDay;
    r.when.time_window = seaas::TimeWindow{start, end};
  }
  if (coin(rng, 20)) r.when.max_per_window = rate(rng);
  if (coin(rng, 10)) r.when.device = pick(rng, devices());
  const auto d = between(rng, 0, 2);
  r.decision = d == 0 ? seaas::RuleDecision::kGrant : d == 1 ? seaas::RuleDecision::kDeny : seaas::RuleDecision::kSelective;
  if (r.decision == seaas::RuleDecision::kSelective) r.constraints = constraints(rng);
  return r;
}

inline seaas::PolicySet policy(Rng& rng, std::size_t max_rules, std::uint64_t version = 1) {
  const auto n = static_cast<std::size_t>(between(rng, 0, static_cast<std::int64_t>(max_rules)));
  std::vector<seaas::PolicyRule> rules;
  for (std::size_t i = 0; i < n; ++i) rules.push_back(rule(rng, "r" + std::to_string(between(rng, 0, 9999)) + "_" + std::to_string(i)));
  seaas::PolicyDefaults defaults;
  defaults.critical = coin(rng, 80) ? seaas::RuleDecision::kDeny : seaas::RuleDecision::kGrant;
  defaults.normal = coin(rng, 80) ? seaas::RuleDecision::kGrant : seaas::RuleDecision::kDeny;
  return seaas::PolicySet(version, std::move(rules), defaults);
}

inline seaas::AccessEvent event(Rng& rng, std::uint64_t seq = 1) {
  seaas::AccessEvent e;
  e.event_seq = seq;
  e.device_id = pick(rng, devices());
  e.app_id = pick(rng, apps());
  e.resource = resource(rng);
  e.action = action(rng);
  e.app_state = state(rng);
  e.at_ms = between(rng, 0, 10 * seaas::kMsPerDay);
  e.payload_bytes = static_cast<std::uint64_t>(between(rng, 0, 1 << 20));
  return e;
}

inline seaas::DeviceDescriptor device(Rng& rng) {
  seaas::DeviceDescriptor d;
  d.device_id = pick(rng, devices()) + "-" + std::to_string(between(rng, 0, 99));
  d.resource_inventory = seaas::ResourceSet();
  for (auto r : seaas::kAllResources) {
    if (coin(rng, 80)) d.resource_inventory.insert(r);
  }
  if (d.resource_inventory.empty()) d.resource_inventory.insert(seaas::Resource::kGps);
  d.agent_version = "agent/" + std::to_string(between(rng, 1, 9));
  return d;
}

inline seaas::Decision decision(Rng& rng) {
  seaas::Decision d;
  d.device_id = pick(rng, devices());
  d.event_seq = static_cast<std::uint64_t>(between(rng, 1, 1'000'000));
  d.verdict = static_cast<seaas::Verdict>(between(rng, 0, 2));
  d.matched_rule_id = coin(rng) ? "DEFAULT" : "rule-" + std::to_string(between(rng, 0, 99));
  d.policy_version = static_cast<std::uint64_t>(between(rng, 1, 50));
  if (d.verdict == seaas::Verdict::kAllowConstrained) d.constraints_applied = constraints(rng);
  d.stale = coin(rng, 10);
  if (coin(rng, 30)) {
    seaas::MitigationAction m;
    m.kind = static_cast<seaas::MitigationKind>(between(rng, 1, 4));
    if (m.kind == seaas::MitigationKind::kRateLimit) m.params = seaas::RateLimitParams{30, 60};
    d.mitigation = m;
  }
  return d;
}

inline std::string sid(Rng& rng) { return "s" + std::to_string(between(rng, 0, 1 << 30)); }

/// A random message of any type.
inline seaas::protocol::Message message(Rng& rng) {
  namespace p = seaas::protocol;
  switch (between(rng, 0, 9)) {
    case 0: return p::Hello{device(rng)};
    case 1: {
      auto pol = policy(rng, 8);
      const auto version = pol.version();
      return p::HelloAck{sid(rng), version, std::move(pol), static_cast<std::uint64_t>(between(rng, 0, 1000))};
    }
    case 2: {
      p::Events ev{sid(rng), {}};
      const auto n = between(rng, 0, 100);
      for (std::int64_t i = 0; i < n; ++i) ev.events.push_back(event(rng, static_cast<std::uint64_t>(i + 1)));
      return ev;
    }
    case 3: {
      p::Decisions ds{sid(rng), {}};
      const auto n = between(rng, 0, 40);
      for (std::int64_t i = 0; i < n; ++i) ds.decisions.push_back(decision(rng));
      return ds;
    }
    case 4: {
      const auto version = static_cast<std::uint64_t>(between(rng, 1, 40));
      return p::PolicyUpdate{sid(rng), version, policy(rng, 8, version)};
    }
    case 5: return p::PolicyAck{sid(rng), static_cast<std::uint64_t>(between(rng, 1, 40))};
    case 6: return p::Heartbeat{sid(rng)};
    case 7: return p::HeartbeatAck{sid(rng)};
    case 8: return p::Bye{sid(rng)};
    default: {
      p::Err e;
      if (coin(rng)) e.sid = sid(rng);
      e.code = pick(rng, std::vector<std::string>{"no_session", "bad_batch", "bad_hello", "malformed_message"});
      e.detail = "detail \"quoted\" \xc3\xa9 " + std::to_string(between(rng, 0, 99));
      return e;
    }
  }
}

}  // namespace gen
