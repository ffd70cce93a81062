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

#include "seaas/policy.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "seaas/errors.hpp"

namespace seaas {

std::string_view to_string(RuleDecision d) noexcept {
  switch (d) {
    case RuleDecision::kGrant: return "GRANT";
    case RuleDecision::kDeny: return "DENY";
    case RuleDecision::kSelective: return "SELECTIVE";
  }
  return "DENY";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kAllow: return "ALLOW";
    case Verdict::kDeny: return "DENY";
    case Verdict::kAllowConstrained: return "ALLOW_CONSTRAINED";
  }
  return "DENY";
}

Verdict parse_verdict(std::string_view name) {
  if (name == "ALLOW") return Verdict::kAllow;
  if (name == "DENY") return Verdict::kDeny;
  if (name == "ALLOW_CONSTRAINED") return Verdict::kAllowConstrained;
  throw MalformedMessage("unknown verdict '" + std::string(name) + "'");
}

bool TimeWindow::contains(std::int64_t at_ms) const noexcept {
  std::int64_t t = at_ms % kMsPerDay;
  if (t < 0) t += kMsPerDay;
  if (start_ms <= end_ms) return t >= start_ms && t < end_ms;
  return t >= start_ms || t < end_ms;
}

int RuleContext::predicate_kinds() const noexcept {
  return static_cast<int>(app_state.has_value()) + static_cast<int>(time_window.has_value()) +
         static_cast<int>(max_per_window.has_value()) + static_cast<int>(device.has_value());
}

// --- selectors -------------------------------------------------------------

AppSelector AppSelector::parse(std::string_view text) {
  AppSelector s;
  if (text == "*") return s;
  auto star = text.find('*');
  if (star == std::string_view::npos) {
    if (!is_valid_app_id(text)) throw InvalidRule("invalid app selector '" + std::string(text) + "'");
    s.kind_ = Kind::kExact;
    s.text_ = std::string(text);
    return s;
  }
  std::string_view prefix = text.substr(0, star);
  if (star != text.size() - 1 || prefix.empty() || !is_valid_app_id(prefix)) {
    throw InvalidRule("invalid app selector '" + std::string(text) +
                      "' (only a trailing '*' is allowed)");
  }
  s.kind_ = Kind::kPrefix;
  s.text_ = std::string(prefix);
  return s;
}

bool AppSelector::matches(std::string_view app_id) const noexcept {
  switch (kind_) {
    case Kind::kAny: return true;
    case Kind::kExact: return app_id == text_;
    case Kind::kPrefix: return app_id.starts_with(text_);
  }
  return false;
}

int AppSelector::score() const noexcept {
  switch (kind_) {
    case Kind::kExact: return 4;
    case Kind::kPrefix: return 2;
    case Kind::kAny: return 0;
  }
  return 0;
}

std::string AppSelector::to_string() const {
  switch (kind_) {
    case Kind::kAny: return "*";
    case Kind::kExact: return text_;
    case Kind::kPrefix: return text_ + "*";
  }
  return "*";
}

ResourceSelector ResourceSelector::parse(std::string_view text) {
  ResourceSelector s;
  if (text == "*") return s;
  if (text.starts_with("category:")) {
    auto cat = text.substr(9);
    s.kind_ = Kind::kCategory;
    if (cat == "HARDWARE") {
      s.category_ = ResourceCategory::kHardware;
    } else if (cat == "SOFTWARE") {
      s.category_ = ResourceCategory::kSoftware;
    } else {
      throw InvalidRule("invalid resource category '" + std::string(cat) + "'");
    }
    return s;
  }
  auto r = try_parse_resource(text);
  if (!r) throw InvalidRule("invalid resource selector '" + std::string(text) + "'");
  return exact(*r);
}

ResourceSelector ResourceSelector::exact(Resource r) {
  ResourceSelector s;
  s.kind_ = Kind::kExact;
  s.resource_ = r;
  return s;
}

bool ResourceSelector::matches(Resource r) const noexcept {
  switch (kind_) {
    case Kind::kAny: return true;
    case Kind::kExact: return r == resource_;
    case Kind::kCategory: return category_of(r) == category_;
  }
  return false;
}

int ResourceSelector::score() const noexcept {
  switch (kind_) {
    case Kind::kExact: return 4;
    case Kind::kCategory: return 2;
    case Kind::kAny: return 0;
  }
  return 0;
}

std::string ResourceSelector::to_string() const {
  switch (kind_) {
    case Kind::kAny: return "*";
    case Kind::kExact: return std::string(seaas::to_string(resource_));
    case Kind::kCategory: return "category:" + std::string(seaas::to_string(category_));
  }
  return "*";
}

ActionSelector ActionSelector::parse(std::string_view text) {
  if (text == "*") return {};
  for (Action a : kAllActions) {
    if (seaas::to_string(a) == text) return exact(a);
  }
  throw InvalidRule("invalid action selector '" + std::string(text) + "'");
}

std::string ActionSelector::to_string() const {
  return action_ ? std::string(seaas::to_string(*action_)) : "*";
}

// --- rules -----------------------------------------------------------------

namespace {

void check_rate_window(const RateWindow& w, const std::string& rule_id) {
  if (w.count == 0) throw InvalidRule("rule '" + rule_id + "': max_per_window.count must be >= 1");
  if (w.window_s == 0 || w.window_s > kMaxRuleWindowSeconds) {
    throw InvalidRule("rule '" + rule_id + "': max_per_window.window_s must be in [1, " +
                      std::to_string(kMaxRuleWindowSeconds) + "]");
  }
}

}  // namespace

void check_rule(const PolicyRule& rule) {
  if (rule.id.empty()) throw InvalidRule("rule id must be non-empty");
  if (rule.id == kDefaultRuleId || rule.id == kFallbackRuleId || rule.id == kQuarantineRuleId) {
    throw InvalidRule("rule id '" + rule.id + "' is reserved");
  }
  if (const auto& tw = rule.when.time_window) {
    if (tw->start_ms < 0 || tw->start_ms >= kMsPerDay || tw->end_ms < 0 || tw->end_ms > kMsPerDay ||
        tw->start_ms == tw->end_ms) {
      throw InvalidRule("rule '" + rule.id + "': time_window must satisfy 0 <= start, end <= " +
                        std::to_string(kMsPerDay) + " and start != end");
    }
  }
  if (rule.when.max_per_window) check_rate_window(*rule.when.max_per_window, rule.id);
  if (rule.when.device && rule.when.device->empty()) {
    throw InvalidRule("rule '" + rule.id + "': device predicate must be non-empty");
  }
  const bool selective = rule.decision == RuleDecision::kSelective;
  if (selective && rule.constraints.empty()) {
    throw InvalidRule("rule '" + rule.id + "': SELECTIVE requires constraints");
  }
  if (!selective && !rule.constraints.empty()) {
    throw InvalidRule("rule '" + rule.id + "': constraints are only allowed on SELECTIVE rules");
  }
  if (rule.constraints.max_per_window) check_rate_window(*rule.constraints.max_per_window, rule.id);
}

int specificity(const PolicyRule& rule) noexcept {
  return rule.app.score() + rule.resource.score() + rule.action.score() +
         rule.when.predicate_kinds();
}

bool match_rule(const PolicyRule& rule, const AccessEvent& event,
                std::uint64_t window_count) noexcept {
  if (!rule.app.matches(event.app_id) || !rule.resource.matches(event.resource) ||
      !rule.action.matches(event.action)) {
    return false;
  }
  const RuleContext& ctx = rule.when;
  if (ctx.app_state && *ctx.app_state != event.app_state) return false;
  if (ctx.time_window && !ctx.time_window->contains(event.at_ms)) return false;
  if (ctx.max_per_window && window_count >= ctx.max_per_window->count) return false;
  if (ctx.device && *ctx.device != event.device_id) return false;
  return true;
}

bool precedes(const PolicyRule& a, const PolicyRule& b) noexcept {
  if (a.priority != b.priority) return a.priority > b.priority;
  const int sa = specificity(a);
  const int sb = specificity(b);
  if (sa != sb) return sa > sb;
  return a.id < b.id;
}

// --- policy sets -----------------------------------------------------------

PolicySet::PolicySet() { build_index(); }

PolicySet::PolicySet(std::uint64_t version, std::vector<PolicyRule> rules, PolicyDefaults defaults)
    : version_(version), rules_(std::move(rules)), defaults_(defaults) {
  if (version_ == 0) throw InvalidRule("policy version must be positive");
  if (defaults_.critical == RuleDecision::kSelective || defaults_.normal == RuleDecision::kSelective) {
    throw InvalidRule("defaults must be GRANT or DENY");
  }
  std::set<std::string_view> ids;
  for (const auto& rule : rules_) {
    check_rule(rule);
    if (!ids.insert(rule.id).second) throw DuplicateRule("duplicate rule id '" + rule.id + "'");
  }
  std::sort(rules_.begin(), rules_.end(), [](const PolicyRule& a, const PolicyRule& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.id < b.id;
  });
  build_index();
}

void PolicySet::build_index() {
  max_window_s_ = 0;
  for (auto& bucket : by_resource_) bucket.clear();
  for (std::uint32_t i = 0; i < rules_.size(); ++i) {
    const auto& rule = rules_[i];
    if (rule.when.max_per_window) max_window_s_ = std::max(max_window_s_, rule.when.max_per_window->window_s);
    for (Resource r : kAllResources) {
      if (rule.resource.matches(r)) by_resource_[static_cast<std::size_t>(r)].push_back(i);
    }
  }
  for (auto& bucket : by_resource_) {
    std::stable_sort(bucket.begin(), bucket.end(), [this](std::uint32_t a, std::uint32_t b) {
      return precedes(rules_[a], rules_[b]);
    });
  }
}

std::span<const std::uint32_t> PolicySet::candidates(Resource r) const noexcept {
  return by_resource_[static_cast<std::size_t>(r)];
}

PolicySet PolicySet::with_version(std::uint64_t version) const {
  PolicySet copy = *this;
  if (version == 0) throw InvalidRule("policy version must be positive");
  copy.version_ = version;
  return copy;
}

Decision evaluate(const PolicySet& set, const AccessEvent& event, WindowCounts window_counts) {
  Decision d;
  d.device_id = event.device_id;
  d.event_seq = event.event_seq;
  d.policy_version = set.version();
  for (std::uint32_t idx : set.candidates(event.resource)) {
    const PolicyRule& rule = set.rules()[idx];
    const std::uint64_t count = idx < window_counts.size() ? window_counts[idx] : 0;
    if (!match_rule(rule, event, count)) continue;
    d.matched_rule_id = rule.id;
    switch (rule.decision) {
      case RuleDecision::kGrant:
        d.verdict = Verdict::kAllow;
        break;
      case RuleDecision::kDeny:
        d.verdict = Verdict::kDeny;
        break;
      case RuleDecision::kSelective:
        d.verdict = Verdict::kAllowConstrained;
        d.constraints_applied = rule.constraints;
        break;
    }
    return d;
  }
  d.matched_rule_id = std::string(kDefaultRuleId);
  d.verdict = set.defaults().for_criticality(classify_criticality(event.resource)) == RuleDecision::kGrant
                  ? Verdict::kAllow
                  : Verdict::kDeny;
  return d;
}

PolicySet apply_update(const PolicySet& active, std::string_view new_document) {
  return parse_policy_document(new_document).with_version(active.version() + 1);
}

// --- store -----------------------------------------------------------------

PolicyStore::PolicyStore(PolicySet initial) {
  active_ = std::make_shared<const PolicySet>(std::move(initial));
  history_.emplace(active_->version(), active_);
}

std::shared_ptr<const PolicySet> PolicyStore::active() const {
  std::lock_guard lock(read_mutex_);
  return active_;
}

std::shared_ptr<const PolicySet> PolicyStore::at_version(std::uint64_t version) const {
  std::lock_guard lock(read_mutex_);
  auto it = history_.find(version);
  return it == history_.end() ? nullptr : it->second;
}

std::shared_ptr<const PolicySet> PolicyStore::update(std::string_view document) {
  std::lock_guard writer(write_mutex_);
  return install_locked(apply_update(*active(), document));
}

std::shared_ptr<const PolicySet> PolicyStore::update(std::vector<PolicyRule> rules,
                                                     PolicyDefaults defaults) {
  std::lock_guard writer(write_mutex_);
  return install_locked(PolicySet(active()->version() + 1, std::move(rules), defaults));
}

void PolicyStore::restore(PolicySet set) {
  std::lock_guard writer(write_mutex_);
  if (set.version() < active()->version()) {
    throw InvalidRule("restored policy version " + std::to_string(set.version()) +
                      " is older than the active version");
  }
  install_locked(std::move(set));
}

std::shared_ptr<const PolicySet> PolicyStore::install_locked(PolicySet next) {
  auto snapshot = std::make_shared<const PolicySet>(std::move(next));
  std::lock_guard lock(read_mutex_);
  history_[snapshot->version()] = snapshot;
  active_ = snapshot;
  return snapshot;
}

}  // namespace seaas
