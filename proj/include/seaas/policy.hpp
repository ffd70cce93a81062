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

// Reconfigurable access policies.
//
// A PolicySet is an immutable, versioned list of rules plus per-criticality
// defaults. Rules select on (app, resource, action) and an optional context
// conjunction; the winning rule among all matches is the first in the total
// order (priority desc, specificity desc, rule id asc). When nothing matches
// the default for the resource's criticality applies.
//
// Policy documents are JSON:
//
//   {
//     "version": 1,
//     "defaults": {"CRITICAL": "DENY", "NORMAL": "GRANT"},
//     "rules": [
//       {"id": "r1", "priority": 100, "app": "com.game.*",
//        "resource": "MICROPHONE", "action": "*",
//        "when": {"app_state": "BACKGROUND"}, "decision": "DENY"}
//     ]
//   }

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seaas/mitigation.hpp"
#include "seaas/resource.hpp"

namespace seaas {

inline constexpr std::string_view kDefaultRuleId = "DEFAULT";
inline constexpr std::string_view kFallbackRuleId = "FALLBACK_DEFAULT";
inline constexpr std::string_view kQuarantineRuleId = "QUARANTINE";

inline constexpr std::int64_t kMsPerDay = 86'400'000;
/// Longest frequency window a rule may declare; matches the monitor horizon.
inline constexpr std::uint32_t kMaxRuleWindowSeconds = 300;

enum class RuleDecision : std::uint8_t { kGrant, kDeny, kSelective };
enum class Verdict : std::uint8_t { kAllow, kDeny, kAllowConstrained };

std::string_view to_string(RuleDecision d) noexcept;
std::string_view to_string(Verdict v) noexcept;
Verdict parse_verdict(std::string_view name);

struct RateWindow {
  std::uint32_t count = 0;
  std::uint32_t window_s = 0;

  friend bool operator==(const RateWindow&, const RateWindow&) = default;
};

/// [start_ms, end_ms) over the time of day; start > end wraps past midnight.
struct TimeWindow {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  bool contains(std::int64_t at_ms) const noexcept;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct RuleContext {
  std::optional<AppState> app_state;
  std::optional<TimeWindow> time_window;
  std::optional<RateWindow> max_per_window;
  // Scopes a rule to one device; used by per-device permission rules.
  std::optional<std::string> device;

  int predicate_kinds() const noexcept;
  bool empty() const noexcept { return predicate_kinds() == 0; }

  friend bool operator==(const RuleContext&, const RuleContext&) = default;
};

struct Constraints {
  std::optional<RateWindow> max_per_window;
  bool foreground_only = false;
  bool redact = false;

  bool empty() const noexcept { return !max_per_window && !foreground_only && !redact; }

  friend bool operator==(const Constraints&, const Constraints&) = default;
};

class AppSelector {
 public:
  enum class Kind : std::uint8_t { kExact, kPrefix, kAny };

  AppSelector() = default;
  /// "*", "com.game.*" or an exact app id. Throws InvalidRule.
  static AppSelector parse(std::string_view text);

  bool matches(std::string_view app_id) const noexcept;
  int score() const noexcept;
  std::string to_string() const;
  Kind kind() const noexcept { return kind_; }

  friend bool operator==(const AppSelector&, const AppSelector&) = default;

 private:
  Kind kind_ = Kind::kAny;
  std::string text_;  // exact id, or the prefix without the trailing '*'
};

class ResourceSelector {
 public:
  enum class Kind : std::uint8_t { kExact, kCategory, kAny };

  ResourceSelector() = default;
  /// "*", "category:HARDWARE", "category:SOFTWARE" or a resource name.
  static ResourceSelector parse(std::string_view text);
  static ResourceSelector exact(Resource r);

  bool matches(Resource r) const noexcept;
  int score() const noexcept;
  std::string to_string() const;
  Kind kind() const noexcept { return kind_; }

  friend bool operator==(const ResourceSelector&, const ResourceSelector&) = default;

 private:
  Kind kind_ = Kind::kAny;
  Resource resource_ = Resource::kMicrophone;
  ResourceCategory category_ = ResourceCategory::kHardware;
};

class ActionSelector {
 public:
  ActionSelector() = default;
  static ActionSelector parse(std::string_view text);
  static ActionSelector exact(Action a) { ActionSelector s; s.action_ = a; return s; }

  bool matches(Action a) const noexcept { return !action_ || *action_ == a; }
  int score() const noexcept { return action_ ? 1 : 0; }
  std::string to_string() const;

  friend bool operator==(const ActionSelector&, const ActionSelector&) = default;

 private:
  std::optional<Action> action_;
};

struct PolicyRule {
  std::string id;
  std::int64_t priority = 0;
  AppSelector app;
  ResourceSelector resource;
  ActionSelector action;
  RuleContext when;
  RuleDecision decision = RuleDecision::kDeny;
  Constraints constraints;

  friend bool operator==(const PolicyRule&, const PolicyRule&) = default;
};

struct PolicyDefaults {
  RuleDecision critical = RuleDecision::kDeny;
  RuleDecision normal = RuleDecision::kGrant;

  RuleDecision for_criticality(Criticality c) const noexcept {
    return c == Criticality::kCritical ? critical : normal;
  }

  friend bool operator==(const PolicyDefaults&, const PolicyDefaults&) = default;
};

/// Throws InvalidRule if a single rule violates its invariants.
void check_rule(const PolicyRule& rule);

/// appScore + resourceScore + actionScore + number of context predicates.
int specificity(const PolicyRule& rule) noexcept;

/// `window_count` is the number of prior accesses by the event's
/// (device, app, resource) inside the rule's frequency window.
bool match_rule(const PolicyRule& rule, const AccessEvent& event,
                std::uint64_t window_count) noexcept;

/// True when `a` precedes `b` in the winner order.
bool precedes(const PolicyRule& a, const PolicyRule& b) noexcept;

class PolicySet {
 public:
  /// Version 1, no rules, CRITICAL denied and NORMAL granted.
  PolicySet();
  /// Validates and canonicalizes. Throws DuplicateRule or InvalidRule.
  PolicySet(std::uint64_t version, std::vector<PolicyRule> rules, PolicyDefaults defaults);

  std::uint64_t version() const noexcept { return version_; }
  /// Canonical order: priority desc, then rule id asc.
  const std::vector<PolicyRule>& rules() const noexcept { return rules_; }
  const PolicyDefaults& defaults() const noexcept { return defaults_; }

  /// Indices into rules() that can match `r`, in winner order.
  std::span<const std::uint32_t> candidates(Resource r) const noexcept;
  /// Largest frequency window any rule predicate declares, in seconds.
  std::uint32_t max_window_s() const noexcept { return max_window_s_; }

  PolicySet with_version(std::uint64_t version) const;

  friend bool operator==(const PolicySet& a, const PolicySet& b) {
    return a.version_ == b.version_ && a.defaults_ == b.defaults_ && a.rules_ == b.rules_;
  }

 private:
  void build_index();

  std::uint64_t version_ = 1;
  std::vector<PolicyRule> rules_;
  PolicyDefaults defaults_;
  std::array<std::vector<std::uint32_t>, kResourceCount> by_resource_;
  std::uint32_t max_window_s_ = 0;
};

struct Decision {
  std::string device_id;
  std::uint64_t event_seq = 0;
  Verdict verdict = Verdict::kDeny;
  std::string matched_rule_id;
  std::uint64_t policy_version = 0;
  std::optional<Constraints> constraints_applied;
  // Set on decisions made from the device-side fallback cache.
  bool stale = false;
  // Amendment attached when the event triggered a threat.
  std::optional<MitigationAction> mitigation;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Per-rule frequency counts, indexed like PolicySet::rules(). An empty span
/// means every count is zero.
using WindowCounts = std::span<const std::uint64_t>;

Decision evaluate(const PolicySet& set, const AccessEvent& event, WindowCounts window_counts = {});

/// Throws ParseError, DuplicateRule or InvalidRule.
PolicySet parse_policy_document(std::string_view text);
std::string serialize_policy_document(const PolicySet& set);

/// Parses `new_document` as the successor of `active` (version + 1).
PolicySet apply_update(const PolicySet& active, std::string_view new_document);

/// Versioned history of policy sets with a single-writer update gate.
/// Readers get immutable snapshots.
class PolicyStore {
 public:
  explicit PolicyStore(PolicySet initial = PolicySet());

  std::shared_ptr<const PolicySet> active() const;
  std::shared_ptr<const PolicySet> at_version(std::uint64_t version) const;

  /// Parses and installs `document` as the next version. On error the
  /// active version is unchanged.
  std::shared_ptr<const PolicySet> update(std::string_view document);
  /// Installs `rules`/`defaults` as the next version.
  std::shared_ptr<const PolicySet> update(std::vector<PolicyRule> rules, PolicyDefaults defaults);
  /// Installs a set verbatim (recovery); its version must exceed the active one.
  void restore(PolicySet set);

  /// Runs `edit` on a copy of the active rules under the writer gate and
  /// installs the result as the next version.
  template <typename Fn>
  std::shared_ptr<const PolicySet> modify(Fn&& edit) {
    std::lock_guard writer(write_mutex_);
    auto current = active();
    std::vector<PolicyRule> rules = current->rules();
    PolicyDefaults defaults = current->defaults();
    edit(rules, defaults);
    return install_locked(PolicySet(current->version() + 1, std::move(rules), defaults));
  }

 private:
  std::shared_ptr<const PolicySet> install_locked(PolicySet next);

  std::mutex write_mutex_;
  mutable std::mutex read_mutex_;
  std::map<std::uint64_t, std::shared_ptr<const PolicySet>> history_;
  std::shared_ptr<const PolicySet> active_;
};

}  // namespace seaas
