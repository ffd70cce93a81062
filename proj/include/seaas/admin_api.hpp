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

// HTTP/JSON admin surface of the cloud service, independent of any HTTP
// library. Routes:
//
//   GET  /devices
//   GET  /devices/{id}/events?since=<cursor>
//   GET  /threats?since=<cursor>
//   GET  /decisions?since=<cursor>
//   GET  /policies[?version=<n>]
//   PUT  /policies                       body: full policy document
//   POST /permissions                    body: {device_id, app_id, resource, verdict, constraints?}
//   POST /quarantine/{device}/{app}/lift
//   GET  /metrics/trials
//
// List endpoints page at most 500 entries past `since` and return the next
// cursor.

#pragma once

#include <map>
#include <string>

#include "seaas/service.hpp"

namespace seaas {

inline constexpr std::uint16_t kDefaultAdminPort = 7741;

struct AdminRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct AdminResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

AdminResponse handle_admin_request(CloudService& service, const AdminRequest& request);

}  // namespace seaas
