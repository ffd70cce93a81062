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

#include <gtest/gtest.h>

#include <algorithm>

#include "generators.hpp"
#include "oracles.hpp"
#include "seaas/detection.hpp"
#include "seaas/errors.hpp"

namespace seaas {
namespace {

AccessEvent at(std::int64_t ms, std::string app = "com.game.puzzle", Resource r = Resource::kGps,
               AppState s = AppState::kForeground, std::uint64_t seq = 1) {
  return AccessEvent{seq, "dev-1", std::move(app), r, Action::kRead, s, ms, 0};
}

Decision decided(Verdict v, std::string rule) {
  Decision d;
  d.device_id = "dev-1";
  d.event_seq = 1;
  d.verdict = v;
  d.matched_rule_id = std::move(rule);
  d.policy_version = 1;
  return d;
}

PolicySet one_rule(std::string id, std::string_view app, std::string_view res, RuleDecision dec,
                   std::optional<AppState> state = std::nullopt) {
  PolicyRule r;
  r.id = std::move(id);
  r.priority = 100;
  r.app = AppSelector::parse(app);
  r.resource = ResourceSelector::parse(res);
  r.decision = dec;
  r.when.app_state = state;
  if (dec == RuleDecision::kSelective) r.constraints.foreground_only = true;
  return PolicySet(1, {r}, {});
}

// --- monitor ---------------------------------------------------------------------------------

TEST(Monitor, FirstAccessCountsOne) {
  WindowState w;
  EXPECT_EQ(monitor_update(w, at(1'000)), 1u);
}

TEST(Monitor, ThirtyOnePerSecond) {
  WindowState w;
  std::uint64_t last = 0;
  for (int i = 0; i < 31; ++i) last = monitor_update(w, at(i * 1'000));
  EXPECT_EQ(last, 31u);
}

TEST(Monitor, EvictsPastHorizon) {
  WindowState w;
  monitor_update(w, at(0));
  EXPECT_EQ(monitor_update(w, at(400'000)), 1u);
  EXPECT_EQ(w.timestamps().size(), 1u);
}

TEST(Monitor, WindowEdgeIsExclusive) {
  WindowState w;
  monitor_update(w, at(0));
  EXPECT_EQ(monitor_update(w, at(60'000)), 1u);
  EXPECT_EQ(monitor_update(w, at(60'001)), 2u);
}

TEST(Monitor, MatchesBruteForceCount) {
  gen::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    WindowState w;
    std::vector<std::int64_t> history;
    std::int64_t t = gen::between(rng, 0, 1'000'000);
    const auto window_s = static_cast<std::uint32_t>(gen::between(rng, 1, 300));
    for (int i = 0; i < 80; ++i) {
      t += gen::between(rng, 0, 20'000);
      history.push_back(t);
      ASSERT_EQ(monitor_update(w, at(t), window_s), oracle::window_count(history, t, window_s * 1000LL));
      for (auto ts : w.timestamps()) ASSERT_GT(ts, t - 300'000);
    }
  }
}

// --- detect ----------------------------------------------------------------------------------

TEST(Detect, RuleDenyIsPolicyViolation) {
  const auto policy = one_rule("game-mic", "com.game.*", "MICROPHONE", RuleDecision::kDeny);
  const auto e = at(0, "com.game.puzzle", Resource::kMicrophone, AppState::kForeground, 7);
  const auto t = detect(e, decided(Verdict::kDeny, "game-mic"), 1, policy);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->threat_type, ThreatType::kPolicyViolation);
  EXPECT_EQ(t->severity, Severity::kHigh);
  EXPECT_EQ(t->event_seqs, std::vector<std::uint64_t>{7});
  EXPECT_EQ(mitigate(*t, 0).kind, MitigationKind::kBlock);
}

TEST(Detect, DefaultDenyIsNotAThreat) {
  const auto e = at(0, "com.x", Resource::kSms);
  EXPECT_FALSE(detect(e, decided(Verdict::kDeny, "DEFAULT"), 1, PolicySet()).has_value());
}

TEST(Detect, FrequencyAboveThreshold) {
  const auto e = at(0, "com.x", Resource::kAccelerometer);
  EXPECT_FALSE(detect(e, decided(Verdict::kAllow, "DEFAULT"), 30, PolicySet()).has_value());
  const auto t = detect(e, decided(Verdict::kAllow, "DEFAULT"), 31, PolicySet());
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->threat_type, ThreatType::kAnomalousFrequency);
  EXPECT_EQ(t->severity, Severity::kMedium);
  const auto m = mitigate(*t, 0);
  EXPECT_EQ(m.kind, MitigationKind::kRateLimit);
  ASSERT_TRUE(m.params.has_value());
  EXPECT_EQ(m.params->count, 30u);
  EXPECT_EQ(m.params->window_s, 60u);
}

TEST(Detect, BackgroundCriticalWithoutGrant) {
  const PolicySet defaults_grant(1, {}, PolicyDefaults{RuleDecision::kGrant, RuleDecision::kGrant});
  const auto e = at(0, "com.x", Resource::kContacts, AppState::kBackground);
  const auto t = detect(e, decided(Verdict::kAllow, "DEFAULT"), 1, defaults_grant);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->threat_type, ThreatType::kBackgroundExfiltration);
  EXPECT_EQ(mitigate(*t, 0).kind, MitigationKind::kRevokePermission);
  EXPECT_EQ(mitigate(*t, 2).kind, MitigationKind::kQuarantineApp);
}

TEST(Detect, BackgroundCriticalWithExplicitGrantIsClean) {
  const auto policy = one_rule("mail-contacts", "com.x", "CONTACTS", RuleDecision::kGrant);
  const auto e = at(0, "com.x", Resource::kContacts, AppState::kBackground);
  EXPECT_FALSE(detect(e, decided(Verdict::kAllow, "mail-contacts"), 1, policy).has_value());
}

TEST(Detect, BackgroundNormalResourceIsClean) {
  const auto e = at(0, "com.x", Resource::kWifiRadio, AppState::kBackground);
  EXPECT_FALSE(detect(e, decided(Verdict::kAllow, "DEFAULT"), 1, PolicySet()).has_value());
}

TEST(Detect, ViolationTakesPrecedenceOverFrequency) {
  const auto policy = one_rule("d", "com.x", "GPS", RuleDecision::kDeny);
  const auto t = detect(at(0, "com.x"), decided(Verdict::kDeny, "d"), 99, policy);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->threat_type, ThreatType::kPolicyViolation);
}

// --- pipeline --------------------------------------------------------------------------------

TEST(Pipeline, ThirdBackgroundThreatQuarantines) {
  const PolicySet grant_all(1, {}, PolicyDefaults{RuleDecision::kGrant, RuleDecision::kGrant});
  DetectionPipeline p;
  for (int i = 0; i < 3; ++i) {
    auto e = at(i * 10'000, "com.spy", Resource::kCamera, AppState::kBackground, static_cast<std::uint64_t>(i + 1));
    const auto out = p.process(e, grant_all, static_cast<std::uint64_t>(i + 1), 0);
    ASSERT_TRUE(out.threat.has_value());
    EXPECT_EQ(out.threat->status, ThreatStatus::kMitigated);
    EXPECT_EQ(out.quarantined, i == 2);
  }
  EXPECT_TRUE(p.is_quarantined("dev-1", "com.spy"));
  const auto out = p.process(at(50'000, "com.spy", Resource::kGps), grant_all, 4, 0);
  EXPECT_EQ(out.decision.verdict, Verdict::kDeny);
  EXPECT_EQ(out.decision.matched_rule_id, "QUARANTINE");
  EXPECT_TRUE(p.lift_quarantine("dev-1", "com.spy"));
  EXPECT_FALSE(p.lift_quarantine("dev-1", "com.spy"));
  EXPECT_EQ(p.high_history("dev-1", "com.spy"), 0u);
}

TEST(Pipeline, RateRuleSeesPriorAccessesOnly) {
  PolicyRule r;
  r.id = "limit";
  r.priority = 10;
  r.app = AppSelector::parse("com.x");
  r.resource = ResourceSelector::parse("GPS");
  r.when.max_per_window = RateWindow{3, 60};
  r.decision = RuleDecision::kGrant;
  const PolicySet set(1, {r}, {});
  DetectionPipeline p;
  std::vector<Verdict> verdicts;
  for (int i = 0; i < 5; ++i) verdicts.push_back(p.process(at(i * 1'000, "com.x"), set, 1, 0).decision.verdict);
  EXPECT_EQ(verdicts, (std::vector<Verdict>{Verdict::kAllow, Verdict::kAllow, Verdict::kAllow, Verdict::kDeny,
                                            Verdict::kDeny}));
}

TEST(Pipeline, DecisionMatchesEvaluateWithPriorCounts) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto set = gen::policy(rng, 40);
    DetectionPipeline p;
    std::map<std::tuple<std::string, std::string, Resource>, std::vector<std::int64_t>> history;
    std::int64_t t = 0;
    for (std::uint64_t seq = 1; seq <= 150; ++seq) {
      auto e = gen::event(rng, seq);
      t += gen::between(rng, 0, 5'000);
      e.at_ms = t;
      e.app_id = gen::coin(rng) ? "com.game.puzzle" : "com.maps.nav";
      if (p.is_quarantined(e.device_id, e.app_id)) continue;
      auto& h = history[{e.device_id, e.app_id, e.resource}];
      std::vector<std::uint64_t> counts(set.rules().size(), 0);
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (const auto& w = set.rules()[i].when.max_per_window) counts[i] = oracle::window_count(h, t, w->window_s * 1000LL);
      }
      auto expected = oracle::evaluate(set, e, counts);
      auto got = p.process(e, set, seq, 0).decision;
      got.mitigation.reset();
      ASSERT_EQ(got, expected) << "trial " << trial << " seq " << seq;
      h.push_back(t);
    }
  }
}

TEST(ThreatNames, RoundTrip) {
  for (auto t : {ThreatType::kPolicyViolation, ThreatType::kAnomalousFrequency, ThreatType::kBackgroundExfiltration}) {
    EXPECT_EQ(parse_threat_type(to_string(t)), t);
  }
  EXPECT_EQ(to_string(ThreatType::kBackgroundExfiltration), "BACKGROUND_EXFILTRATION");
  EXPECT_THROW(parse_threat_type("SPAM"), Error);
}

}  // namespace
}  // namespace seaas
