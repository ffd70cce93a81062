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

// The shipped evaluation material: the default policy packs and the
// generator for labeled scenario suites designed against them.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "seaas/harness.hpp"
#include "seaas/policy.hpp"

namespace seaas {

/// The 64-rule default pack: grants for well-known apps, denies for
/// over-reaching app families, a few context rules.
PolicySet default_policy_pack();
/// A 16-rule subset of the default pack.
PolicySet small_policy_pack();

struct SuiteSpec {
  std::uint32_t trials = 5;
  std::uint32_t users = 10;
  std::uint64_t seed = 42;
  std::uint64_t min_threats_per_trial = 100;
  // Undetected threats per trial are sized so detected/undetected lands in
  // [min_ratio, max_ratio).
  double min_ratio = 13.2;
  double max_ratio = 15.0;
};

using Suite = std::vector<std::pair<std::uint32_t, std::vector<UserScript>>>;

/// Generates labeled scripts against `pack`. Labels come from what the
/// pack and the detector are expected to flag, except for a share of
/// covert background accesses the pack has no rule for.
Suite generate_suite(const PolicySet& pack, const SuiteSpec& spec = {});

/// Writes `trial_<n>/<user>.jsonl` under `dir`.
void write_suite(const Suite& suite, const std::filesystem::path& dir);

}  // namespace seaas
