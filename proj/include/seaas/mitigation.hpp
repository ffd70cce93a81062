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

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace seaas {

enum class MitigationKind : std::uint8_t {
  kNone,
  kBlock,
  kRateLimit,
  kRevokePermission,
  kQuarantineApp,
};

std::string_view to_string(MitigationKind k) noexcept;
MitigationKind parse_mitigation_kind(std::string_view name);

/// Rate-limit parameters carried by RATE_LIMIT actions.
struct RateLimitParams {
  std::uint32_t count = 0;
  std::uint32_t window_s = 0;

  friend bool operator==(const RateLimitParams&, const RateLimitParams&) = default;
};

struct MitigationAction {
  MitigationKind kind = MitigationKind::kNone;
  std::optional<RateLimitParams> params;

  friend bool operator==(const MitigationAction&, const MitigationAction&) = default;
};

}  // namespace seaas
