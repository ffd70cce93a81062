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

// JSON forms of the domain types, shared by policy documents, wire message
// bodies and event-log lines. Serializers emit keys in a fixed order so the
// text is canonical; parsers throw MalformedMessage unless noted.

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "seaas/detection.hpp"
#include "seaas/policy.hpp"
#include "seaas/resource.hpp"

namespace seaas::json {

using Json = nlohmann::ordered_json;

Json to_json(const AccessEvent& e);
AccessEvent event_from_json(const Json& j);

Json to_json(const DeviceDescriptor& d);
DeviceDescriptor device_from_json(const Json& j);

Json to_json(const Constraints& c);
Json to_json(const MitigationAction& m);
MitigationAction mitigation_from_json(const Json& j);

Json to_json(const Decision& d);
Decision decision_from_json(const Json& j);

Json to_json(const PolicyRule& r);
Json to_json(const PolicySet& s);
/// Throws ParseError, DuplicateRule or InvalidRule. `source` (the document
/// text, when available) lets errors carry line/column anchors.
PolicySet policy_from_json(const Json& j, std::string_view source = {});
Constraints constraints_from_json(const Json& j);

Json to_json(const ThreatReport& t);
ThreatReport threat_from_json(const Json& j);

// Typed field access; each throws MalformedMessage naming the field.
const Json& field(const Json& obj, const char* key);
std::string get_string(const Json& obj, const char* key);
std::uint64_t get_u64(const Json& obj, const char* key);
std::int64_t get_i64(const Json& obj, const char* key);

}  // namespace seaas::json
