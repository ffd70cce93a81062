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

#include "seaas/json_codec.hpp"

#include <algorithm>
#include <limits>
#include <regex>
#include <set>
#include <string>

#include "seaas/errors.hpp"

namespace seaas::json {
namespace {

template <typename Err>
[[noreturn]] void fail(const std::string& what, std::size_t line = 0, std::size_t column = 0) {
  if constexpr (std::is_base_of_v<PolicyError, Err>) {
    throw Err(what, line, column);
  } else {
    throw Err(what);
  }
}

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw MalformedMessage(std::string(what) + " must be a JSON object");
}

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const char* what) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw MalformedMessage(std::string("unknown key '") + key + "' in " + what);
    }
  }
}

template <typename T, typename Parse>
T enum_field(const Json& obj, const char* key, Parse parse) {
  const std::string text = get_string(obj, key);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw MalformedMessage(std::string("field '") + key + "': " + e.what());
  }
}

std::uint32_t get_u32(const Json& obj, const char* key) {
  const std::uint64_t v = get_u64(obj, key);
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw MalformedMessage(std::string("field '") + key + "' out of range");
  }
  return static_cast<std::uint32_t>(v);
}

bool get_bool(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_boolean()) throw MalformedMessage(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

Json to_json(const RateWindow& w) {
  Json j = Json::object();
  j["count"] = w.count;
  j["window_s"] = w.window_s;
  return j;
}

RateWindow rate_window_from_json(const Json& j) {
  require_object(j, "max_per_window");
  reject_unknown_keys(j, {"count", "window_s"}, "max_per_window");
  return RateWindow{get_u32(j, "count"), get_u32(j, "window_s")};
}

}  // namespace

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) throw MalformedMessage(std::string("expected an object holding '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedMessage(std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) throw MalformedMessage(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t get_u64(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw MalformedMessage(std::string("field '") + key + "' must be a non-negative integer");
}

std::int64_t get_i64(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (v.is_number_unsigned()) {
    if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw MalformedMessage(std::string("field '") + key + "' out of range");
    }
    return v.get<std::int64_t>();
  }
  if (v.is_number_integer()) return v.get<std::int64_t>();
  throw MalformedMessage(std::string("field '") + key + "' must be an integer");
}

// --- events and devices ------------------------------------------------------

Json to_json(const AccessEvent& e) {
  Json j = Json::object();
  j["event_seq"] = e.event_seq;
  j["device_id"] = e.device_id;
  j["app_id"] = e.app_id;
  j["resource"] = to_string(e.resource);
  j["action"] = to_string(e.action);
  j["app_state"] = to_string(e.app_state);
  j["at_ms"] = e.at_ms;
  j["payload_bytes"] = e.payload_bytes;
  return j;
}

AccessEvent event_from_json(const Json& j) {
  require_object(j, "event");
  reject_unknown_keys(j, {"event_seq", "device_id", "app_id", "resource", "action", "app_state", "at_ms",
                          "payload_bytes"},
                      "event");
  AccessEvent e;
  e.event_seq = get_u64(j, "event_seq");
  e.device_id = get_string(j, "device_id");
  e.app_id = get_string(j, "app_id");
  e.resource = enum_field<Resource>(j, "resource", parse_resource);
  e.action = enum_field<Action>(j, "action", parse_action);
  e.app_state = enum_field<AppState>(j, "app_state", parse_app_state);
  e.at_ms = get_i64(j, "at_ms");
  e.payload_bytes = get_u64(j, "payload_bytes");
  return e;
}

Json to_json(const DeviceDescriptor& d) {
  Json j = Json::object();
  j["device_id"] = d.device_id;
  Json inv = Json::array();
  for (Resource r : d.resource_inventory.to_vector()) inv.push_back(to_string(r));
  j["inventory"] = std::move(inv);
  j["agent_version"] = d.agent_version;
  return j;
}

DeviceDescriptor device_from_json(const Json& j) {
  require_object(j, "device");
  reject_unknown_keys(j, {"device_id", "inventory", "agent_version"}, "device");
  DeviceDescriptor d;
  d.device_id = get_string(j, "device_id");
  d.agent_version = get_string(j, "agent_version");
  const Json& inv = field(j, "inventory");
  if (!inv.is_array()) throw MalformedMessage("field 'inventory' must be an array");
  d.resource_inventory = ResourceSet();
  for (const auto& item : inv) {
    if (!item.is_string()) throw MalformedMessage("inventory entries must be strings");
    auto r = try_parse_resource(item.get<std::string>());
    if (!r) throw MalformedMessage("unknown resource '" + item.get<std::string>() + "' in inventory");
    d.resource_inventory.insert(*r);
  }
  return d;
}

// --- decisions -----------------------------------------------------------------

Json to_json(const Constraints& c) {
  Json j = Json::object();
  if (c.max_per_window) j["max_per_window"] = to_json(*c.max_per_window);
  if (c.foreground_only) j["foreground_only"] = true;
  if (c.redact) j["redact"] = true;
  return j;
}

Constraints constraints_from_json(const Json& j) {
  require_object(j, "constraints");
  reject_unknown_keys(j, {"max_per_window", "foreground_only", "redact"}, "constraints");
  Constraints c;
  if (j.contains("max_per_window")) c.max_per_window = rate_window_from_json(j.at("max_per_window"));
  if (j.contains("foreground_only")) c.foreground_only = get_bool(j, "foreground_only");
  if (j.contains("redact")) c.redact = get_bool(j, "redact");
  return c;
}

Json to_json(const MitigationAction& m) {
  Json j = Json::object();
  j["kind"] = to_string(m.kind);
  if (m.params) {
    Json p = Json::object();
    p["count"] = m.params->count;
    p["window_s"] = m.params->window_s;
    j["params"] = std::move(p);
  }
  return j;
}

MitigationAction mitigation_from_json(const Json& j) {
  require_object(j, "mitigation");
  reject_unknown_keys(j, {"kind", "params"}, "mitigation");
  MitigationAction m;
  m.kind = enum_field<MitigationKind>(j, "kind", parse_mitigation_kind);
  if (j.contains("params")) {
    const Json& p = j.at("params");
    require_object(p, "params");
    reject_unknown_keys(p, {"count", "window_s"}, "params");
    m.params = RateLimitParams{get_u32(p, "count"), get_u32(p, "window_s")};
  }
  return m;
}

Json to_json(const Decision& d) {
  Json j = Json::object();
  j["device_id"] = d.device_id;
  j["event_seq"] = d.event_seq;
  j["verdict"] = to_string(d.verdict);
  j["matched_rule_id"] = d.matched_rule_id;
  j["policy_version"] = d.policy_version;
  if (d.constraints_applied) j["constraints"] = to_json(*d.constraints_applied);
  if (d.stale) j["stale"] = true;
  if (d.mitigation) j["mitigation"] = to_json(*d.mitigation);
  return j;
}

Decision decision_from_json(const Json& j) {
  require_object(j, "decision");
  reject_unknown_keys(j, {"device_id", "event_seq", "verdict", "matched_rule_id", "policy_version",
                          "constraints", "stale", "mitigation"},
                      "decision");
  Decision d;
  d.device_id = get_string(j, "device_id");
  d.event_seq = get_u64(j, "event_seq");
  d.verdict = enum_field<Verdict>(j, "verdict", parse_verdict);
  d.matched_rule_id = get_string(j, "matched_rule_id");
  d.policy_version = get_u64(j, "policy_version");
  if (j.contains("constraints")) d.constraints_applied = constraints_from_json(j.at("constraints"));
  if (j.contains("stale")) d.stale = get_bool(j, "stale");
  if (j.contains("mitigation")) d.mitigation = mitigation_from_json(j.at("mitigation"));
  return d;
}

// --- threats -------------------------------------------------------------------

Json to_json(const ThreatReport& t) {
  Json j = Json::object();
  j["threat_id"] = t.threat_id;
  j["device_id"] = t.device_id;
  j["app_id"] = t.app_id;
  j["resource"] = to_string(t.resource);
  j["event_seqs"] = t.event_seqs;
  j["threat_type"] = to_string(t.threat_type);
  j["severity"] = to_string(t.severity);
  j["status"] = to_string(t.status);
  j["mitigation"] = to_json(t.mitigation);
  j["detected_at_ms"] = t.detected_at_ms;
  return j;
}

ThreatReport threat_from_json(const Json& j) {
  require_object(j, "threat");
  ThreatReport t;
  t.threat_id = get_u64(j, "threat_id");
  t.device_id = get_string(j, "device_id");
  t.app_id = get_string(j, "app_id");
  t.resource = enum_field<Resource>(j, "resource", parse_resource);
  const Json& seqs = field(j, "event_seqs");
  if (!seqs.is_array()) throw MalformedMessage("field 'event_seqs' must be an array");
  for (const auto& s : seqs) {
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw MalformedMessage("event_seqs entries must be non-negative integers");
    }
    t.event_seqs.push_back(s.get<std::uint64_t>());
  }
  t.threat_type = enum_field<ThreatType>(j, "threat_type", parse_threat_type);
  t.severity = enum_field<Severity>(j, "severity", parse_severity);
  t.status = enum_field<ThreatStatus>(j, "status", parse_threat_status);
  t.mitigation = mitigation_from_json(field(j, "mitigation"));
  t.detected_at_ms = get_i64(j, "detected_at_ms");
  return t;
}

// --- policy documents ------------------------------------------------------------

namespace {

struct Anchor {
  std::size_t line = 0;
  std::size_t column = 0;
};

Anchor anchor_at(std::string_view source, std::size_t offset) {
  Anchor a{1, 1};
  for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++a.line;
      a.column = 1;
    } else {
      ++a.column;
    }
  }
  return a;
}

// Position of the `nth` (0-based) `"id": "<id>"` pair in the source text.
Anchor locate_rule(std::string_view source, const std::string& id, std::size_t nth) {
  if (source.empty()) return {};
  const std::string quoted = Json(id).dump();
  std::string pattern;
  for (char c : quoted) {
    if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) pattern += '\\';
    pattern += c;
  }
  const std::regex re("\"id\"\\s*:\\s*" + pattern);
  std::size_t seen = 0;
  for (auto it = std::cregex_iterator(source.data(), source.data() + source.size(), re);
       it != std::cregex_iterator(); ++it) {
    if (seen++ == nth) return anchor_at(source, static_cast<std::size_t>(it->position()));
  }
  return {};
}

RuleDecision default_decision(const Json& defaults, const char* key) {
  const std::string v = get_string(defaults, key);
  if (v == "DENY") return RuleDecision::kDeny;
  if (v == "GRANT" || v == "ALLOW") return RuleDecision::kGrant;
  throw InvalidRule(std::string("defaults.") + key + " must be GRANT or DENY");
}

PolicyRule rule_from_json(const Json& j) {
  require_object(j, "rule");
  reject_unknown_keys(j, {"id", "priority", "app", "resource", "action", "when", "decision", "constraints"},
                      "rule");
  PolicyRule r;
  r.id = get_string(j, "id");
  r.priority = get_i64(j, "priority");
  r.app = AppSelector::parse(get_string(j, "app"));
  r.resource = ResourceSelector::parse(get_string(j, "resource"));
  r.action = ActionSelector::parse(get_string(j, "action"));
  if (j.contains("when")) {
    const Json& w = j.at("when");
    require_object(w, "when");
    reject_unknown_keys(w, {"app_state", "time_window", "max_per_window", "device"}, "when");
    if (w.contains("app_state")) r.when.app_state = enum_field<AppState>(w, "app_state", parse_app_state);
    if (w.contains("time_window")) {
      const Json& tw = w.at("time_window");
      require_object(tw, "time_window");
      reject_unknown_keys(tw, {"start_ms", "end_ms"}, "time_window");
      r.when.time_window = TimeWindow{get_i64(tw, "start_ms"), get_i64(tw, "end_ms")};
    }
    if (w.contains("max_per_window")) r.when.max_per_window = rate_window_from_json(w.at("max_per_window"));
    if (w.contains("device")) r.when.device = get_string(w, "device");
  }
  const std::string decision = get_string(j, "decision");
  if (decision == "GRANT") {
    r.decision = RuleDecision::kGrant;
  } else if (decision == "DENY") {
    r.decision = RuleDecision::kDeny;
  } else if (decision == "SELECTIVE") {
    r.decision = RuleDecision::kSelective;
  } else {
    throw InvalidRule("decision must be GRANT, DENY or SELECTIVE");
  }
  if (j.contains("constraints")) r.constraints = constraints_from_json(j.at("constraints"));
  check_rule(r);
  return r;
}

}  // namespace

Json to_json(const PolicyRule& r) {
  Json j = Json::object();
  j["id"] = r.id;
  j["priority"] = r.priority;
  j["app"] = r.app.to_string();
  j["resource"] = r.resource.to_string();
  j["action"] = r.action.to_string();
  if (!r.when.empty()) {
    Json w = Json::object();
    if (r.when.app_state) w["app_state"] = to_string(*r.when.app_state);
    if (r.when.time_window) {
      Json tw = Json::object();
      tw["start_ms"] = r.when.time_window->start_ms;
      tw["end_ms"] = r.when.time_window->end_ms;
      w["time_window"] = std::move(tw);
    }
    if (r.when.max_per_window) w["max_per_window"] = to_json(*r.when.max_per_window);
    if (r.when.device) w["device"] = *r.when.device;
    j["when"] = std::move(w);
  }
  j["decision"] = to_string(r.decision);
  if (r.decision == RuleDecision::kSelective) j["constraints"] = to_json(r.constraints);
  return j;
}

Json to_json(const PolicySet& s) {
  Json j = Json::object();
  j["version"] = s.version();
  Json defaults = Json::object();
  defaults["CRITICAL"] = to_string(s.defaults().critical);
  defaults["NORMAL"] = to_string(s.defaults().normal);
  j["defaults"] = std::move(defaults);
  Json rules = Json::array();
  for (const auto& rule : s.rules()) rules.push_back(to_json(rule));
  j["rules"] = std::move(rules);
  return j;
}

PolicySet policy_from_json(const Json& j, std::string_view source) {
  // Structural problems surface as ParseError; rule-level ones keep their
  // own type. Both are anchored at the offending rule when possible.
  if (!j.is_object()) throw ParseError("policy document must be a JSON object", 1, 1);
  std::uint64_t version = 1;
  PolicyDefaults defaults;
  std::vector<PolicyRule> rules;
  try {
    reject_unknown_keys(j, {"version", "defaults", "rules"}, "policy document");
    if (j.contains("version")) version = get_u64(j, "version");
    const Json& d = field(j, "defaults");
    require_object(d, "defaults");
    reject_unknown_keys(d, {"CRITICAL", "NORMAL"}, "defaults");
    defaults.critical = default_decision(d, "CRITICAL");
    defaults.normal = default_decision(d, "NORMAL");
  } catch (const PolicyError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  const Json* rules_json = nullptr;
  if (j.contains("rules")) {
    rules_json = &j.at("rules");
    if (!rules_json->is_array()) throw ParseError("'rules' must be an array");
  }
  std::map<std::string, std::size_t> occurrences;
  std::set<std::string> ids;
  if (rules_json != nullptr) {
    for (std::size_t i = 0; i < rules_json->size(); ++i) {
      const Json& rj = (*rules_json)[i];
      std::string id;
      if (rj.is_object() && rj.contains("id") && rj.at("id").is_string()) id = rj.at("id").get<std::string>();
      const std::size_t nth = occurrences[id]++;
      const std::string where = "rule #" + std::to_string(i + 1) + (id.empty() ? "" : " ('" + id + "')");
      try {
        rules.push_back(rule_from_json(rj));
      } catch (const InvalidRule& e) {
        auto a = locate_rule(source, id, nth);
        throw InvalidRule(where + ": " + e.what(), a.line, a.column);
      } catch (const Error& e) {
        auto a = locate_rule(source, id, nth);
        throw ParseError(where + ": " + e.what(), a.line, a.column);
      }
      if (!ids.insert(id).second) {
        auto a = locate_rule(source, id, nth);
        throw DuplicateRule(where + ": duplicate rule id '" + id + "'", a.line, a.column);
      }
    }
  }
  try {
    return PolicySet(version, std::move(rules), defaults);
  } catch (const InvalidRule& e) {
    throw InvalidRule(e.what(), 1, 1);
  }
}

}  // namespace seaas::json

namespace seaas {

PolicySet parse_policy_document(std::string_view text) {
  json::Json j;
  try {
    j = json::Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
  return json::policy_from_json(j, text);
}

std::string serialize_policy_document(const PolicySet& set) {
  return json::to_json(set).dump(2) + "\n";
}

}  // namespace seaas
