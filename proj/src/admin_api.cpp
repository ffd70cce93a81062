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

#include "seaas/admin_api.hpp"

#include <charconv>
#include <vector>

#include "seaas/errors.hpp"

namespace seaas {
namespace {

using json::Json;

constexpr std::size_t kPageLimit = 500;

AdminResponse reply(int status, const Json& body) { return AdminResponse{status, body.dump(), "application/json"}; }

AdminResponse error(int status, std::string_view code, std::string_view detail) {
  Json j = Json::object();
  j["error"] = code;
  j["detail"] = detail;
  return reply(status, j);
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      ++pos;
      continue;
    }
    const auto next = path.find('/', pos);
    parts.emplace_back(path.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next;
  }
  return parts;
}

// Parses ?since=; missing means 0. Returns nullopt for anything that is not
// a non-negative integer.
std::optional<std::uint64_t> cursor_param(const AdminRequest& req, const char* name = "since") {
  auto it = req.query.find(name);
  if (it == req.query.end() || it->second.empty()) return 0;
  const std::string& s = it->second;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

AdminResponse bad_cursor(const AdminRequest& req, const char* name = "since") {
  auto it = req.query.find(name);
  return error(400, "bad_cursor",
               std::string(name) + " must be a non-negative integer, got '" + (it == req.query.end() ? "" : it->second) + "'");
}

template <typename T>
AdminResponse page_reply(const char* key, const Page<T>& page) {
  Json items = Json::array();
  for (const auto& item : page.items) items.push_back(json::to_json(item));
  Json j = Json::object();
  j[key] = std::move(items);
  j["cursor"] = page.cursor;
  return reply(200, j);
}

AdminResponse policy_error(const PolicyError& e) {
  Json j = Json::object();
  const char* code = dynamic_cast<const DuplicateRule*>(&e) != nullptr ? "duplicate_rule"
                     : dynamic_cast<const InvalidRule*>(&e) != nullptr ? "invalid_rule"
                                                                        : "parse_error";
  j["error"] = code;
  j["detail"] = e.what();
  j["line"] = e.line();
  j["column"] = e.column();
  return reply(422, j);
}

AdminResponse get_devices(CloudService& service) {
  Json arr = Json::array();
  for (const auto& info : service.devices()) {
    Json d = Json::object();
    d["device"] = json::to_json(info.descriptor);
    d["last_seq"] = info.last_seq;
    d["connected"] = info.connected;
    if (info.sid) d["sid"] = *info.sid;
    d["policy_version_acked"] = info.policy_version_acked;
    arr.push_back(std::move(d));
  }
  Json j = Json::object();
  j["devices"] = std::move(arr);
  return reply(200, j);
}

AdminResponse get_policies(CloudService& service, const AdminRequest& req) {
  std::shared_ptr<const PolicySet> set = service.active_policy();
  if (req.query.contains("version")) {
    auto v = cursor_param(req, "version");
    if (!v) return bad_cursor(req, "version");
    set = service.policy_at(*v);
    if (!set) return error(404, "not_found", "no policy version " + std::to_string(*v));
  }
  Json j = Json::object();
  j["version"] = set->version();
  j["policy"] = json::to_json(*set);
  return reply(200, j);
}

AdminResponse post_permissions(CloudService& service, const AdminRequest& req) {
  Json body;
  try {
    body = Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    return error(400, "bad_body", std::string("body is not JSON: ") + e.what());
  }
  try {
    const std::string device_id = json::get_string(body, "device_id");
    const std::string app_id = json::get_string(body, "app_id");
    const std::string resource = json::get_string(body, "resource");
    const std::string verdict = json::get_string(body, "verdict");
    RuleDecision decision;
    if (verdict == "GRANT" || verdict == "ALLOW") {
      decision = RuleDecision::kGrant;
    } else if (verdict == "DENY") {
      decision = RuleDecision::kDeny;
    } else if (verdict == "SELECTIVE") {
      decision = RuleDecision::kSelective;
    } else {
      return error(400, "bad_body", "verdict must be GRANT, DENY or SELECTIVE");
    }
    std::optional<Constraints> constraints;
    if (body.contains("constraints")) constraints = json::constraints_from_json(body.at("constraints"));
    const std::uint64_t version = service.set_permission(device_id, app_id, resource, decision, constraints);
    Json j = Json::object();
    j["version"] = version;
    j["rule_id"] = "user:" + device_id + ":" + app_id + ":" + resource;
    return reply(200, j);
  } catch (const Error& e) {
    return error(400, "bad_body", e.what());
  }
}

}  // namespace

AdminResponse handle_admin_request(CloudService& service, const AdminRequest& req) {
  const auto parts = split_path(req.path);
  const std::string& m = req.method;
  try {
    if (parts.size() == 1 && parts[0] == "devices" && m == "GET") return get_devices(service);
    if (parts.size() == 3 && parts[0] == "devices" && parts[2] == "events" && m == "GET") {
      auto since = cursor_param(req);
      if (!since) return bad_cursor(req);
      return page_reply("events", service.list_device_events(parts[1], *since, kPageLimit));
    }
    if (parts.size() == 1 && parts[0] == "threats" && m == "GET") {
      auto since = cursor_param(req);
      if (!since) return bad_cursor(req);
      return page_reply("threats", service.list_threat_feed(*since, kPageLimit));
    }
    if (parts.size() == 1 && parts[0] == "decisions" && m == "GET") {
      auto since = cursor_param(req);
      if (!since) return bad_cursor(req);
      return page_reply("decisions", service.list_decisions(*since, kPageLimit));
    }
    if (parts.size() == 1 && parts[0] == "policies") {
      if (m == "GET") return get_policies(service, req);
      if (m == "PUT") {
        try {
          Json j = Json::object();
          j["version"] = service.put_policy(req.body);
          return reply(200, j);
        } catch (const PolicyError& e) {
          return policy_error(e);
        }
      }
    }
    if (parts.size() == 1 && parts[0] == "permissions" && m == "POST") return post_permissions(service, req);
    if (parts.size() == 4 && parts[0] == "quarantine" && parts[3] == "lift" && m == "POST") {
      Json j = Json::object();
      j["lifted"] = service.lift_quarantine(parts[1], parts[2]);
      return reply(200, j);
    }
    if (parts.size() == 2 && parts[0] == "metrics" && parts[1] == "trials" && m == "GET") {
      Json j = Json::object();
      j["trials"] = service.trials();
      return reply(200, j);
    }
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
  return error(404, "not_found", m + " " + req.path);
}

}  // namespace seaas
