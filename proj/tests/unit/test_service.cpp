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

#include <atomic>
#include <fstream>
#include <thread>

#include "crash_sim.hpp"
#include "generators.hpp"
#include "seaas/errors.hpp"
#include "seaas/event_log.hpp"
#include "seaas/service.hpp"
#include "seaas/suite.hpp"
#include "temp_dir.hpp"

namespace seaas {
namespace {

using protocol::Decisions;
using protocol::Err;
using protocol::HelloAck;
using testing_support::TempDir;

AccessEvent ev(std::uint64_t seq, const std::string& device = "dev-1", std::string app = "com.maps.nav",
               Resource r = Resource::kGps, AppState s = AppState::kForeground) {
  return AccessEvent{seq, device, std::move(app), r, Action::kRead, s, 1'000'000 + static_cast<std::int64_t>(seq) * 1000, 0};
}

DeviceDescriptor dev(const std::string& id = "dev-1") { return {id, ResourceSet::all(), "agent/1"}; }

HelloAck hello(CloudService& svc, const std::string& id = "dev-1") {
  return std::get<HelloAck>(svc.handshake({dev(id)}));
}

std::vector<AccessEvent> range(std::uint64_t lo, std::uint64_t hi, const std::string& device = "dev-1") {
  std::vector<AccessEvent> out;
  for (auto s = lo; s <= hi; ++s) out.push_back(ev(s, device));
  return out;
}

// --- event log -----------------------------------------------------------------------------

TEST(EventLogTest, AppendsGaplessGroups) {
  TempDir dir;
  const auto file = dir.path() / "events.log";
  {
    EventLog log(file, 0);
    EXPECT_EQ(log.append({{LogKind::kEvent, json::Json{{"a", 1}}}, {LogKind::kDecision, json::Json{{"b", 2}}}}, 5), 2u);
    EXPECT_EQ(log.append({{LogKind::kThreat, json::Json::object()}}, 6), 3u);
  }
  const auto r = read_log(file);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_FALSE(r.truncated);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.records[i].seq, i + 1);
  EXPECT_EQ(r.records[2].kind, LogKind::kThreat);
  EXPECT_EQ(r.records[0].server_ms, 5);
}

TEST(EventLogTest, TornTailIsCut) {
  TempDir dir;
  const auto file = dir.path() / "events.log";
  {
    EventLog log(file, 0);
    log.append({{LogKind::kEvent, json::Json::object()}}, 1);
  }
  const auto intact = std::filesystem::file_size(file);
  {
    std::ofstream out(file, std::ios::app);
    out << R"({"seq":2,"kind":"EVE)";
  }
  const auto r = read_log(file);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(std::filesystem::file_size(file), intact);
}

TEST(EventLogTest, GapBeforeTailThrows) {
  TempDir dir;
  const auto file = dir.path() / "events.log";
  {
    std::ofstream out(file);
    out << R"({"seq":1,"kind":"EVENT","ts":0,"payload":{}})" << '\n'
        << R"({"seq":3,"kind":"EVENT","ts":0,"payload":{}})" << '\n'
        << R"({"seq":4,"kind":"EVENT","ts":0,"payload":{}})" << '\n';
  }
  EXPECT_THROW(read_log(file), StorageError);
}

TEST(EventLogTest, KindNames) {
  for (auto k : {LogKind::kEvent, LogKind::kDecision, LogKind::kThreat, LogKind::kPolicyChange, LogKind::kQuarantine,
                 LogKind::kDevice}) {
    EXPECT_EQ(parse_log_kind(to_string(k)), k);
  }
}

// --- handshake -----------------------------------------------------------------------------

TEST(Handshake, FreshDeviceStartsAtZero) {
  CloudService svc;
  const auto ack = hello(svc);
  EXPECT_EQ(ack.last_seq, 0u);
  EXPECT_EQ(ack.version, 1u);
  EXPECT_FALSE(ack.sid.empty());
}

TEST(Handshake, ReconnectInheritsLastSeq) {
  CloudService svc;
  const auto first = hello(svc);
  ASSERT_TRUE(std::holds_alternative<Decisions>(svc.process_event_batch({first.sid, range(1, 41)})));
  const auto second = hello(svc);
  EXPECT_EQ(second.last_seq, 41u);
  EXPECT_NE(second.sid, first.sid);
  const auto stale = svc.heartbeat({first.sid});
  EXPECT_EQ(std::get<Err>(stale).code, "no_session");
}

TEST(Handshake, EmptyDeviceIdIsBadHello) {
  CloudService svc;
  const auto reply = svc.handshake({DeviceDescriptor{"", ResourceSet::all(), "a"}});
  EXPECT_EQ(std::get<Err>(reply).code, "bad_hello");
  const auto empty_inv = svc.handshake({DeviceDescriptor{"d", ResourceSet(), "a"}});
  EXPECT_EQ(std::get<Err>(empty_inv).code, "bad_hello");
}

// --- batches -------------------------------------------------------------------------------

TEST(Batches, DecisionsAlignWithEvents) {
  CloudService svc;
  const auto ack = hello(svc);
  const auto reply = std::get<Decisions>(svc.process_event_batch({ack.sid, range(1, 10)}));
  ASSERT_EQ(reply.decisions.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(reply.decisions[i].event_seq, i + 1);
  EXPECT_EQ(svc.decisions().size(), 10u);
}

TEST(Batches, ResendReturnsIdenticalDecisions) {
  CloudService svc(ServiceConfig{}, default_policy_pack());
  const auto ack = hello(svc);
  std::vector<AccessEvent> batch = range(1, 10);
  batch[8].app_id = "com.game.puzzle";
  batch[8].resource = Resource::kMicrophone;
  const auto first = std::get<Decisions>(svc.process_event_batch({ack.sid, batch}));
  const auto threats = svc.threats().size();
  const std::vector<AccessEvent> resend(batch.begin() + 7, batch.end());
  const auto again = std::get<Decisions>(svc.process_event_batch({ack.sid, resend}));
  ASSERT_EQ(again.decisions.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.decisions[i], first.decisions[7 + i]);
  EXPECT_EQ(protocol::encode_body(again), protocol::encode_body(Decisions{ack.sid, {first.decisions.begin() + 7, first.decisions.end()}}));
  EXPECT_EQ(svc.decisions().size(), 10u);
  EXPECT_EQ(svc.threats().size(), threats);
}

TEST(Batches, OutOfOrderBatchRejectedWithoutSideEffects) {
  CloudService svc;
  const auto ack = hello(svc);
  svc.process_event_batch({ack.sid, range(1, 10)});
  const auto reply = svc.process_event_batch({ack.sid, {ev(12), ev(11)}});
  EXPECT_EQ(std::get<Err>(reply).code, "bad_batch");
  EXPECT_EQ(svc.decisions().size(), 10u);
}

TEST(Batches, UnknownSessionAndInventory) {
  CloudService svc;
  EXPECT_EQ(std::get<Err>(svc.process_event_batch({"nope", range(1, 1)})).code, "no_session");
  DeviceDescriptor narrow{"dev-1", ResourceSet(), "a"};
  narrow.resource_inventory.insert(Resource::kCamera);
  const auto ack = std::get<HelloAck>(svc.handshake({narrow}));
  EXPECT_EQ(std::get<Err>(svc.process_event_batch({ack.sid, range(1, 1)})).code, "inventory_mismatch");
  auto wrong_device = ev(1, "dev-2", "com.maps.nav", Resource::kCamera);
  EXPECT_EQ(std::get<Err>(svc.process_event_batch({ack.sid, {wrong_device}})).code, "malformed_event");
}

TEST(Batches, UnexpectedMessageType) {
  CloudService svc;
  const auto replies = svc.handle_message(protocol::HeartbeatAck{"x"});
  ASSERT_EQ(replies.size(), 1u);
  EXPECT_EQ(std::get<Err>(replies[0]).code, "unexpected_message");
}

// --- policy --------------------------------------------------------------------------------

TEST(Permissions, QuickRuleDeniesMicrophone) {
  CloudService svc;
  const auto v = svc.set_permission("dev-1", "com.social.chat", "MICROPHONE", RuleDecision::kDeny);
  EXPECT_EQ(v, 2u);
  const auto policy = svc.active_policy();
  ASSERT_EQ(policy->rules().size(), 1u);
  const auto& r = policy->rules()[0];
  EXPECT_EQ(r.priority, 10'000);
  EXPECT_EQ(r.when.device, std::optional<std::string>("dev-1"));
  const auto ack = hello(svc);
  auto e = ev(1, "dev-1", "com.social.chat", Resource::kMicrophone);
  const auto d = std::get<Decisions>(svc.process_event_batch({ack.sid, {e}})).decisions.at(0);
  EXPECT_EQ(d.verdict, Verdict::kDeny);
  EXPECT_EQ(d.matched_rule_id, r.id);
  EXPECT_EQ(d.policy_version, 2u);
}

TEST(Permissions, GrantThenDenyLeavesOneRule) {
  CloudService svc;
  svc.set_permission("dev-1", "com.social.chat", "CAMERA", RuleDecision::kGrant);
  svc.set_permission("dev-1", "com.social.chat", "CAMERA", RuleDecision::kDeny);
  const auto policy = svc.active_policy();
  EXPECT_EQ(policy->version(), 3u);
  ASSERT_EQ(policy->rules().size(), 1u);
  EXPECT_EQ(policy->rules()[0].decision, RuleDecision::kDeny);
}

TEST(Permissions, UnknownResourceLeavesVersion) {
  CloudService svc;
  EXPECT_THROW(svc.set_permission("dev-1", "com.social.chat", "TOASTER", RuleDecision::kDeny), UnknownResource);
  EXPECT_EQ(svc.active_policy()->version(), 1u);
}

TEST(PolicyPush, SessionsReceiveUpdates) {
  CloudService svc;
  std::vector<protocol::Message> pushed;
  const auto ack = std::get<HelloAck>(svc.handshake({dev()}, [&](const protocol::Message& m) { pushed.push_back(m); }));
  const auto v = svc.put_policy(serialize_policy_document(small_policy_pack()));
  ASSERT_EQ(pushed.size(), 1u);
  const auto& update = std::get<protocol::PolicyUpdate>(pushed[0]);
  EXPECT_EQ(update.sid, ack.sid);
  EXPECT_EQ(update.version, v);
  EXPECT_EQ(update.policy.rules(), small_policy_pack().rules());
  EXPECT_THROW(svc.put_policy("{"), ParseError);
  EXPECT_EQ(pushed.size(), 1u);
  EXPECT_EQ(svc.active_policy()->version(), v);
}

TEST(PolicyPush, BatchUsesSingleVersion) {
  CloudService svc;
  const auto ack = hello(svc);
  std::atomic<bool> stop{false};
  std::thread writer([&] {
    while (!stop) svc.set_permission("dev-9", "com.x", "GPS", RuleDecision::kGrant);
  });
  for (std::uint64_t b = 0; b < 50; ++b) {
    const auto reply = std::get<Decisions>(svc.process_event_batch({ack.sid, range(b * 20 + 1, b * 20 + 20)}));
    for (const auto& d : reply.decisions) ASSERT_EQ(d.policy_version, reply.decisions.front().policy_version);
  }
  stop = true;
  writer.join();
}

// --- feed ----------------------------------------------------------------------------------

TEST(Feed, CursorSemantics) {
  CloudService svc(ServiceConfig{}, default_policy_pack());
  const auto ack = hello(svc);
  std::vector<AccessEvent> batch;
  for (std::uint64_t s = 1; s <= 3; ++s) batch.push_back(ev(s, "dev-1", "com.game.puzzle", Resource::kMicrophone));
  svc.process_event_batch({ack.sid, batch});
  const auto page = svc.list_threat_feed(0);
  ASSERT_EQ(page.items.size(), 3u);
  EXPECT_EQ(page.cursor, 3u);
  const auto again = svc.list_threat_feed(0);
  EXPECT_EQ(again.items, page.items);
  const auto tail = svc.list_threat_feed(3);
  EXPECT_TRUE(tail.items.empty());
  EXPECT_EQ(tail.cursor, 3u);
  const auto past = svc.list_threat_feed(9);
  EXPECT_TRUE(past.items.empty());
  EXPECT_EQ(past.cursor, 9u);
  const auto limited = svc.list_threat_feed(0, 2);
  EXPECT_EQ(limited.items.size(), 2u);
  EXPECT_EQ(limited.cursor, 2u);
}

// --- liveness -------------------------------------------------------------------------------

TEST(Liveness, SilentSessionsExpire) {
  std::atomic<std::int64_t> now{0};
  CloudService svc(ServiceConfig{}, std::nullopt, [&] { return now.load(); });
  const auto a = hello(svc, "dev-a");
  const auto b = hello(svc, "dev-b");
  now = 10'000;
  EXPECT_TRUE(std::holds_alternative<protocol::HeartbeatAck>(svc.heartbeat({a.sid})));
  now = 15'001;
  EXPECT_EQ(svc.reap_expired_sessions(), 1u);
  EXPECT_EQ(std::get<Err>(svc.heartbeat({b.sid})).code, "no_session");
  EXPECT_TRUE(std::holds_alternative<protocol::HeartbeatAck>(svc.heartbeat({a.sid})));
}

// --- concurrency ----------------------------------------------------------------------------

TEST(Concurrency, ParallelDevicesKeepLogGapless) {
  TempDir dir;
  ServiceConfig config;
  config.data_dir = dir.path();
  config.snapshot_every = 50;
  {
    CloudService svc(config, default_policy_pack());
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        const std::string id = "dev-" + std::to_string(t);
        const auto ack = hello(svc, id);
        for (std::uint64_t b = 0; b < 10; ++b) svc.process_event_batch({ack.sid, range(b * 10 + 1, b * 10 + 10, id)});
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(svc.decisions().size(), 800u);
    for (int t = 0; t < 8; ++t) {
      EXPECT_EQ(svc.list_device_events("dev-" + std::to_string(t), 0, 1000).items.size(), 100u);
    }
  }
  const auto log = read_log(dir.path() / "events.log");
  for (std::size_t i = 0; i < log.records.size(); ++i) ASSERT_EQ(log.records[i].seq, i + 1);
  const auto state = recover_state(dir.path());
  EXPECT_EQ(state.decisions.size(), 800u);
}

// --- recovery -------------------------------------------------------------------------------

TEST(Recovery, EmptyDirectoryGivesDefaultPolicy) {
  TempDir dir;
  const auto state = recover_state(dir.path());
  ASSERT_EQ(state.policy_history.size(), 1u);
  EXPECT_EQ(state.policy_history.back().version(), 1u);
  EXPECT_TRUE(state.decisions.empty());
}

TEST(Recovery, RestartRestoresStores) {
  TempDir dir;
  ServiceConfig config;
  config.data_dir = dir.path();
  config.snapshot_every = 0;
  std::vector<Decision> before;
  {
    CloudService svc(config, default_policy_pack());
    const auto ack = hello(svc);
    std::vector<AccessEvent> events = range(1, 100);
    for (std::size_t i = 0; i < events.size(); i += 3) {
      events[i].app_id = "com.game.puzzle";
      events[i].resource = Resource::kMicrophone;
    }
    svc.process_event_batch({ack.sid, events});
    svc.set_permission("dev-1", "com.maps.nav", "GPS", RuleDecision::kDeny);
    before = svc.decisions();
  }
  CloudService again(config, std::nullopt);
  EXPECT_EQ(again.decisions(), before);
  EXPECT_EQ(hello(again).last_seq, 100u);
  EXPECT_EQ(again.active_policy()->version(), 2u);
  ASSERT_NE(again.policy_at(1), nullptr);
}

TEST(Recovery, SnapshotAndLogAgree) {
  TempDir a_dir;
  TempDir b_dir;
  ServiceConfig a{DetectionConfig{}, a_dir.path(), 7};
  ServiceConfig b{DetectionConfig{}, b_dir.path(), 0};
  gen::Rng rng(5);
  const auto events = crash_sim::event_stream(rng, "dev-1", 200);
  const Clock clock = [] { return crash_sim::kFixedNow; };
  {
    CloudService sa(a, default_policy_pack(), clock);
    CloudService sb(b, default_policy_pack(), clock);
    const auto ka = hello(sa);
    const auto kb = hello(sb);
    for (std::size_t i = 0; i < events.size(); i += 10) {
      std::vector<AccessEvent> batch(events.begin() + static_cast<std::ptrdiff_t>(i),
                                     events.begin() + static_cast<std::ptrdiff_t>(i + 10));
      sa.process_event_batch({ka.sid, batch});
      sb.process_event_batch({kb.sid, batch});
    }
  }
  EXPECT_TRUE(std::filesystem::exists(a_dir.path() / "snapshot.json"));
  EXPECT_FALSE(std::filesystem::exists(b_dir.path() / "snapshot.json"));
  const auto ra = recover_state(a_dir.path());
  const auto rb = recover_state(b_dir.path());
  EXPECT_EQ(ra.decisions, rb.decisions);
  EXPECT_EQ(ra.threats, rb.threats);
  EXPECT_EQ(ra.pipeline.quarantined(), rb.pipeline.quarantined());
  EXPECT_EQ(snapshot_to_json(ra), snapshot_to_json(rb));
}

TEST(Recovery, TornWritesAtRandomPoints) {
  gen::Rng rng(21);
  const auto events = crash_sim::event_stream(rng, "dev-crash", 120);
  const auto outcome = crash_sim::run(default_policy_pack(), events, 8, 99);
  EXPECT_EQ(outcome.points, 8);
  EXPECT_EQ(outcome.matched, outcome.points);
  for (const auto& f : outcome.failures) ADD_FAILURE() << f;
}

}  // namespace
}  // namespace seaas
