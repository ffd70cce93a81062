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

#include <fstream>

#include "seaas/admin_api.hpp"
#include "seaas/errors.hpp"
#include "seaas/json_codec.hpp"
#include "seaas/net.hpp"
#include "seaas/suite.hpp"
#include "temp_dir.hpp"

namespace seaas {
namespace {

using json::Json;

AdminResponse call(CloudService& svc, std::string method, std::string path, std::string body = {},
                   std::map<std::string, std::string> query = {}) {
  return handle_admin_request(svc, AdminRequest{std::move(method), std::move(path), std::move(query), std::move(body)});
}

void seed_threats(CloudService& svc, int n) {
  const auto ack = std::get<protocol::HelloAck>(svc.handshake({DeviceDescriptor{"dev-1", ResourceSet::all(), "a"}}));
  std::vector<AccessEvent> events;
  for (int i = 1; i <= n; ++i) {
    events.push_back(AccessEvent{static_cast<std::uint64_t>(i), "dev-1", "com.game.puzzle", Resource::kMicrophone,
                                 Action::kRecord, AppState::kForeground, 1'000'000 + i * 1000LL, 0});
  }
  svc.process_event_batch({ack.sid, events});
}

TEST(AdminRoutes, UnknownRouteIs404) {
  CloudService svc;
  const auto r = call(svc, "GET", "/nothing");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(Json::parse(r.body)["error"], "not_found");
  EXPECT_EQ(call(svc, "DELETE", "/policies").status, 404);
}

TEST(AdminRoutes, ThreatFeedPaging) {
  CloudService svc(ServiceConfig{}, default_policy_pack());
  seed_threats(svc, 3);
  const auto all = Json::parse(call(svc, "GET", "/threats", {}, {{"since", "0"}}).body);
  EXPECT_EQ(all["threats"].size(), 3u);
  EXPECT_EQ(all["cursor"], 3);
  const auto tail = Json::parse(call(svc, "GET", "/threats", {}, {{"since", "3"}}).body);
  EXPECT_TRUE(tail["threats"].empty());
  EXPECT_EQ(tail["cursor"], 3);
  const auto bad = call(svc, "GET", "/threats", {}, {{"since", "-1"}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(Json::parse(bad.body)["error"], "bad_cursor");
  EXPECT_EQ(call(svc, "GET", "/decisions", {}, {{"since", "x"}}).status, 400);
}

TEST(AdminRoutes, DevicesAndEvents) {
  CloudService svc(ServiceConfig{}, default_policy_pack());
  seed_threats(svc, 4);
  const auto devices = Json::parse(call(svc, "GET", "/devices").body);
  ASSERT_EQ(devices["devices"].size(), 1u);
  EXPECT_EQ(devices["devices"][0]["last_seq"], 4);
  EXPECT_EQ(devices["devices"][0]["connected"], true);
  const auto events = Json::parse(call(svc, "GET", "/devices/dev-1/events", {}, {{"since", "2"}}).body);
  EXPECT_EQ(events["events"].size(), 2u);
  const auto decisions = Json::parse(call(svc, "GET", "/decisions").body);
  EXPECT_EQ(decisions["decisions"].size(), 4u);
}

TEST(AdminRoutes, PutPolicyBumpsVersion) {
  CloudService svc;
  svc.put_policy(R"({"defaults": {"CRITICAL": "DENY", "NORMAL": "GRANT"}, "rules": []})");
  const auto r = call(svc, "PUT", "/policies", serialize_policy_document(small_policy_pack()));
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(Json::parse(r.body)["version"], 3);
  const auto got = Json::parse(call(svc, "GET", "/policies").body);
  EXPECT_EQ(got["version"], 3);
  const auto old = Json::parse(call(svc, "GET", "/policies", {}, {{"version", "2"}}).body);
  EXPECT_EQ(old["version"], 2);
  EXPECT_EQ(call(svc, "GET", "/policies", {}, {{"version", "99"}}).status, 404);
}

TEST(AdminRoutes, DuplicateRuleIs422WithLine) {
  CloudService svc;
  const std::string doc =
      "{\"defaults\": {\"CRITICAL\": \"DENY\", \"NORMAL\": \"GRANT\"}, \"rules\": [\n"
      "{\"id\": \"a\", \"priority\": 1, \"app\": \"*\", \"resource\": \"GPS\", \"action\": \"*\", \"decision\": \"DENY\"},\n"
      "{\"id\": \"a\", \"priority\": 1, \"app\": \"*\", \"resource\": \"GPS\", \"action\": \"*\", \"decision\": \"DENY\"}\n"
      "]}";
  const auto r = call(svc, "PUT", "/policies", doc);
  EXPECT_EQ(r.status, 422);
  const auto j = Json::parse(r.body);
  EXPECT_EQ(j["error"], "duplicate_rule");
  EXPECT_EQ(j["line"], 3);
  EXPECT_EQ(svc.active_policy()->version(), 1u);
  EXPECT_EQ(Json::parse(call(svc, "PUT", "/policies", "{").body)["error"], "parse_error");
}

TEST(AdminRoutes, PermissionsEndpoint) {
  CloudService svc;
  const auto ok = call(svc, "POST", "/permissions",
                       R"({"device_id":"dev-1","app_id":"com.social.chat","resource":"MICROPHONE","verdict":"DENY"})");
  ASSERT_EQ(ok.status, 200);
  EXPECT_EQ(Json::parse(ok.body)["version"], 2);
  EXPECT_EQ(call(svc, "POST", "/permissions",
                 R"({"device_id":"dev-1","app_id":"com.social.chat","resource":"TOASTER","verdict":"DENY"})")
                .status,
            400);
  EXPECT_EQ(call(svc, "POST", "/permissions", "not json").status, 400);
  EXPECT_EQ(call(svc, "POST", "/permissions",
                 R"({"device_id":"dev-1","app_id":"com.social.chat","resource":"GPS","verdict":"MAYBE"})")
                .status,
            400);
  EXPECT_EQ(svc.active_policy()->version(), 2u);
}

TEST(AdminRoutes, QuarantineLiftAndTrials) {
  CloudService svc;
  const auto r = Json::parse(call(svc, "POST", "/quarantine/dev-1/com.x/lift").body);
  EXPECT_EQ(r["lifted"], false);
  svc.record_trial(Json{{"trial_id", 1}});
  const auto t = Json::parse(call(svc, "GET", "/metrics/trials").body);
  ASSERT_EQ(t["trials"].size(), 1u);
  EXPECT_EQ(t["trials"][0]["trial_id"], 1);
}

// --- live HTTP -------------------------------------------------------------------------------

TEST(AdminHttp, ServesApiAndUi) {
  testing_support::TempDir ui;
  {
    std::ofstream(ui.path() / "index.html") << "<html>console</html>";
  }
  CloudService svc(ServiceConfig{}, default_policy_pack());
  seed_threats(svc, 2);
  AdminServer server(svc, ui.path());
  server.start({"127.0.0.1", 0});
  ASSERT_NE(server.port(), 0);
  AdminClient client({"127.0.0.1", server.port()});

  EXPECT_EQ(client.threats().size(), 2u);
  const auto page = client.request("GET", "/threats?since=1");
  EXPECT_EQ(page.status, 200);
  EXPECT_EQ(Json::parse(page.body)["threats"].size(), 1u);
  EXPECT_EQ(client.request("GET", "/threats?since=abc").status, 400);

  const auto v = client.put_policy(serialize_policy_document(small_policy_pack()));
  EXPECT_EQ(v, 2u);
  EXPECT_THROW(client.put_policy("{"), Error);

  const auto html = client.request("GET", "/ui/index.html");
  EXPECT_EQ(html.status, 200);
  EXPECT_EQ(html.body, "<html>console</html>");
  EXPECT_EQ(client.request("GET", "/missing").status, 404);
  server.stop();
}

TEST(AdminHttp, UnreachableServerThrows) {
  AdminClient client({"127.0.0.1", 1});
  EXPECT_THROW(client.request("GET", "/devices"), TransportError);
}

}  // namespace
}  // namespace seaas
