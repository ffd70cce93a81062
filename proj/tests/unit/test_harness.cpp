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

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "seaas/errors.hpp"
#include "seaas/harness.hpp"
#include "seaas/service.hpp"
#include "seaas/suite.hpp"
#include "temp_dir.hpp"

namespace seaas {
namespace {

using testing_support::TempDir;

TrialReport report(std::uint32_t id, std::uint64_t detected, std::uint64_t undetected, std::uint64_t local,
                   std::uint64_t off, std::size_t rules = 64) {
  TrialReport r;
  r.trial_id = id;
  r.events_total = 1000;
  r.threats_injected = detected + undetected;
  r.detected = detected;
  r.undetected = undetected;
  const auto m = compute_detection_metrics(static_cast<std::int64_t>(detected), static_cast<std::int64_t>(undetected));
  r.detection_ratio = m.ratio;
  r.detection_rate = m.rate;
  r.work_units_local = local;
  r.work_units_offloaded = off;
  if (local > 0) r.work_ratio = static_cast<double>(off) / static_cast<double>(local);
  r.policy_rules = rules;
  return r;
}

std::vector<UserScript> small_trial(std::uint64_t seed, std::uint32_t users = 3) {
  SuiteSpec spec;
  spec.trials = 1;
  spec.users = users;
  spec.seed = seed;
  spec.min_threats_per_trial = 20;
  return generate_suite(default_policy_pack(), spec).at(0).second;
}

// --- metrics -----------------------------------------------------------------------------------

TEST(Metrics, ReferenceRun) {
  const auto m = compute_detection_metrics(6850, 520);
  ASSERT_TRUE(m.ratio && m.rate);
  EXPECT_NEAR(*m.ratio, 6850.0 / 520.0, 1e-12);
  EXPECT_NEAR(*m.ratio, 13.17, 0.01);
  EXPECT_NEAR(*m.rate, 0.929, 0.001);
}

TEST(Metrics, EdgeCases) {
  const auto none_missed = compute_detection_metrics(10, 0);
  EXPECT_FALSE(none_missed.ratio.has_value());
  EXPECT_DOUBLE_EQ(*none_missed.rate, 1.0);
  const auto empty = compute_detection_metrics(0, 0);
  EXPECT_FALSE(empty.ratio.has_value());
  EXPECT_FALSE(empty.rate.has_value());
  const auto zero = compute_detection_metrics(0, 5);
  EXPECT_DOUBLE_EQ(*zero.ratio, 0.0);
  EXPECT_DOUBLE_EQ(*zero.rate, 0.0);
  EXPECT_THROW(compute_detection_metrics(-1, 3), MetricError);
  EXPECT_THROW(compute_detection_metrics(1, -3), MetricError);
}

TEST(Metrics, RateIsMonotoneInRatio) {
  for (std::int64_t u = 1; u < 40; ++u) {
    for (std::int64_t d = 0; d < 400; d += 7) {
      const auto a = compute_detection_metrics(d, u);
      const auto b = compute_detection_metrics(d + 1, u);
      EXPECT_LT(*a.ratio, *b.ratio);
      EXPECT_LT(*a.rate, *b.rate);
      EXPECT_NEAR(*a.rate, *a.ratio / (1.0 + *a.ratio), 1e-12);
    }
  }
}

// --- efficiency ----------------------------------------------------------------------------------

TEST(Efficiency, GateAppliesFrom64Rules) {
  const auto v = compare_cpu_modes(report(1, 10, 1, 22'000, 4'000));
  EXPECT_NEAR(v.work_ratio, 0.1818, 1e-4);
  EXPECT_TRUE(v.threshold_applied);
  EXPECT_TRUE(v.pass);
  EXPECT_FALSE(compare_cpu_modes(report(1, 10, 1, 10'000, 3'000)).pass);
  const auto small = compare_cpu_modes(report(1, 10, 1, 11'000, 4'000, 16));
  EXPECT_FALSE(small.threshold_applied);
  EXPECT_TRUE(small.pass);
  EXPECT_FALSE(compare_cpu_modes(report(1, 10, 1, 4'000, 4'000, 16)).pass);
  EXPECT_THROW(compare_cpu_modes(report(1, 10, 1, 0, 4'000)), ComparisonError);
}

// --- export --------------------------------------------------------------------------------------

TEST(Export, FiveTrialsGiveSixLines) {
  std::vector<TrialReport> reports;
  for (std::uint32_t i = 1; i <= 5; ++i) reports.push_back(report(i, 130 + i, 10, 23'000, 4'000));
  const auto csv = results_csv(reports);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "trial_id,events_total,threats_injected,detected,undetected,false_positives,detection_ratio,"
            "detection_rate,work_units_local,work_units_offloaded,work_ratio");
  EXPECT_NE(csv.find("1,1000,141,131,10,0,13.1000,0.9291,23000,4000,0.1739\n"), std::string::npos) << csv;
  TempDir dir;
  export_results(reports, dir.path() / "a.csv");
  export_results(reports, dir.path() / "b.csv");
  std::ifstream a(dir.path() / "a.csv"), b(dir.path() / "b.csv");
  const std::string sa{std::istreambuf_iterator<char>(a), {}}, sb{std::istreambuf_iterator<char>(b), {}};
  EXPECT_EQ(sa, csv);
  EXPECT_EQ(sa, sb);
}

TEST(Export, UndefinedMetricsPrintNA) {
  const auto csv = results_csv({report(1, 0, 0, 100, 20)});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_NE(csv.find(",N/A,N/A,"), std::string::npos) << csv;
}

TEST(Export, Failures) {
  TempDir dir;
  EXPECT_THROW(export_results({}, dir.path() / "x.csv"), ExportError);
  EXPECT_THROW(export_results({report(1, 1, 1, 1, 1)}, dir.path() / "no" / "such" / "x.csv"), ExportError);
}

// --- label join ------------------------------------------------------------------------------------

TEST(LabelJoinTest, CountsAndRejectsUnlabeled) {
  std::map<LabelKey, ScenarioLabel> labels = {{{"d", 1}, ScenarioLabel::kBenign},
                                              {{"d", 2}, ScenarioLabel::kPolicyViolation},
                                              {{"d", 3}, ScenarioLabel::kBackgroundExfiltration},
                                              {{"d", 4}, ScenarioLabel::kBenign}};
  ThreatReport t;
  t.device_id = "d";
  t.event_seqs = {2};
  ThreatReport fp = t;
  fp.event_seqs = {4};
  const auto j = join_labels(labels, {t, fp});
  EXPECT_EQ(j.threats_injected, 2u);
  EXPECT_EQ(j.detected, 1u);
  EXPECT_EQ(j.undetected, 1u);
  EXPECT_EQ(j.false_positives, 1u);
  ThreatReport stray = t;
  stray.event_seqs = {99};
  EXPECT_THROW(join_labels(labels, {stray}), TrialInvalid);
}

// --- trials ----------------------------------------------------------------------------------------

TEST(Trial, DeviceIds) { EXPECT_EQ(trial_device_id(3, "user_07"), "trial_3.user_07"); }

TEST(Trial, JoinMatchesIndependentRecount) {
  const auto users = small_trial(5);
  TrialConfig config;
  config.trial_id = 1;
  config.users = users;
  config.policy = default_policy_pack();
  CloudService svc(ServiceConfig{}, config.policy);
  const auto r = run_trial(config, &svc);

  std::set<std::pair<std::string, std::uint64_t>> hit;
  for (const auto& t : svc.threats()) {
    for (auto s : t.event_seqs) hit.insert({t.device_id, s});
  }
  std::uint64_t injected = 0, detected = 0, fps = 0, events = 0;
  for (const auto& u : users) {
    const auto device = trial_device_id(1, u.name);
    for (std::size_t i = 0; i < u.script.events.size(); ++i) {
      ++events;
      const bool reported = hit.contains({device, i + 1});
      if (u.script.events[i].is_threat()) {
        ++injected;
        detected += reported ? 1 : 0;
      } else if (reported) {
        ++fps;
      }
    }
  }
  EXPECT_EQ(r.events_total, events);
  EXPECT_EQ(r.threats_injected, injected);
  EXPECT_EQ(r.detected, detected);
  EXPECT_EQ(r.undetected, injected - detected);
  EXPECT_EQ(r.false_positives, fps);
  EXPECT_EQ(svc.trials().size(), 1u);
  ASSERT_TRUE(r.work_ratio.has_value());
  EXPECT_LE(*r.work_ratio, 0.25);
}

TEST(Trial, DeterministicAcrossAgentCounts) {
  TrialConfig config;
  config.trial_id = 2;
  config.users = small_trial(8, 6);
  config.policy = default_policy_pack();
  const auto serial = run_trial(config);
  config.agents = 4;
  const auto parallel = run_trial(config);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(results_csv({serial}), results_csv({run_trial(config)}));
}

TEST(Trial, NoThreatsGivesUndefinedMetrics) {
  TrialConfig config;
  config.policy = default_policy_pack();
  ScenarioScript calm;
  for (int i = 0; i < 20; ++i) {
    calm.events.push_back({1'772'442'000'000 + i * 5'000LL, "com.maps.nav", Resource::kGps, Action::kRead,
                           AppState::kForeground, 10, ScenarioLabel::kBenign});
  }
  config.users = {{"user_01", calm}};
  const auto r = run_trial(config);
  EXPECT_EQ(r.threats_injected, 0u);
  EXPECT_FALSE(r.detection_ratio.has_value());
  EXPECT_FALSE(r.detection_rate.has_value());
  EXPECT_NE(results_csv({r}).find("N/A"), std::string::npos);
}

TEST(Trial, DuplicateUsersRejected) {
  TrialConfig config;
  config.users = {{"u", {}}, {"u", {}}};
  EXPECT_THROW(run_trial(config), TrialInvalid);
}

TEST(Trial, DenyRulesForLabelledThreatsNeverReduceDetection) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto users = small_trial(seed);
    TrialConfig base;
    base.users = users;
    base.policy = default_policy_pack();
    const auto before = run_trial(base);

    std::vector<PolicyRule> rules = base.policy.rules();
    std::set<std::string> seen;
    for (const auto& u : users) {
      for (const auto& e : u.script.events) {
        if (e.label != ScenarioLabel::kPolicyViolation && e.label != ScenarioLabel::kBackgroundExfiltration) continue;
        const std::string id = "extra:" + e.app + ":" + std::string(to_string(e.resource)) + ":" +
                               std::string(to_string(e.action)) + ":" + std::string(to_string(e.app_state));
        if (!seen.insert(id).second || seen.size() % 2 == 0) continue;
        PolicyRule r;
        r.id = id;
        r.priority = 9'000;
        r.app = AppSelector::parse(e.app);
        r.resource = ResourceSelector::exact(e.resource);
        r.action = ActionSelector::exact(e.action);
        r.when.app_state = e.app_state;
        r.decision = RuleDecision::kDeny;
        rules.push_back(r);
      }
    }
    TrialConfig stricter = base;
    stricter.policy = PolicySet(1, rules, base.policy.defaults());
    const auto after = run_trial(stricter);
    EXPECT_GE(after.detected, before.detected) << "seed " << seed;
    EXPECT_EQ(after.threats_injected, before.threats_injected);
  }
}

// --- suite loading -----------------------------------------------------------------------------------

TEST(SuiteIo, WriteThenLoad) {
  SuiteSpec spec;
  spec.trials = 2;
  spec.users = 2;
  spec.min_threats_per_trial = 10;
  const auto suite = generate_suite(default_policy_pack(), spec);
  TempDir dir;
  write_suite(suite, dir.path());
  const auto loaded = load_suite(dir.path());
  ASSERT_EQ(loaded.size(), 2u);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(loaded[t].first, suite[t].first);
    ASSERT_EQ(loaded[t].second.size(), suite[t].second.size());
    for (std::size_t u = 0; u < loaded[t].second.size(); ++u) {
      EXPECT_EQ(loaded[t].second[u].name, suite[t].second[u].name);
      EXPECT_EQ(loaded[t].second[u].script, suite[t].second[u].script);
    }
  }
  TempDir empty;
  EXPECT_THROW(load_suite(empty.path()), TrialInvalid);
}

TEST(SuiteIo, GenerationIsSeeded) {
  SuiteSpec spec;
  spec.trials = 1;
  spec.users = 2;
  spec.min_threats_per_trial = 10;
  const auto a = generate_suite(default_policy_pack(), spec);
  const auto b = generate_suite(default_policy_pack(), spec);
  EXPECT_EQ(a.at(0).second.at(1).script, b.at(0).second.at(1).script);
  spec.seed = 43;
  const auto c = generate_suite(default_policy_pack(), spec);
  EXPECT_NE(a.at(0).second.at(1).script, c.at(0).second.at(1).script);
}

TEST(PolicyPack, Sizes) {
  EXPECT_EQ(default_policy_pack().rules().size(), 64u);
  EXPECT_EQ(small_policy_pack().rules().size(), 16u);
}

}  // namespace
}  // namespace seaas
