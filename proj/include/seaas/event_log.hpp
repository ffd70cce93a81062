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

// Append-only JSON-lines log. One record per line:
//
//   {"seq":12,"kind":"DECISION","ts":1760000000000,"payload":{...}}
//
// Sequence numbers are gapless starting at 1. Records that belong together
// (an event and everything it caused) are appended with a single write so a
// crash can only tear the final group.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seaas/json_codec.hpp"

namespace seaas {

enum class LogKind : std::uint8_t { kEvent, kDecision, kThreat, kPolicyChange, kQuarantine, kDevice };

std::string_view to_string(LogKind k) noexcept;
LogKind parse_log_kind(std::string_view name);

struct LogRecord {
  std::uint64_t seq = 0;
  LogKind kind = LogKind::kEvent;
  std::int64_t server_ms = 0;
  json::Json payload;
  // Byte offset of the line in the file.
  std::uint64_t offset = 0;
};

struct LogReadResult {
  std::vector<LogRecord> records;
  bool truncated = false;          // a torn tail was cut off
  std::uint64_t valid_bytes = 0;   // length of the intact prefix
};

/// Reads every complete record. A torn or unparseable final line is cut
/// from the file (when `repair` is set) and reported; corruption before the
/// tail or a sequence gap throws StorageError.
LogReadResult read_log(const std::filesystem::path& file, bool repair = true);

class EventLog {
 public:
  /// Opens `file` for appending; the next sequence number follows `last_seq`.
  EventLog(std::filesystem::path file, std::uint64_t last_seq, bool sync = false);
  ~EventLog();

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  /// Appends a group of records atomically (one write) and returns the
  /// sequence number of the last one.
  std::uint64_t append(const std::vector<std::pair<LogKind, json::Json>>& group, std::int64_t server_ms);

  /// Cuts the file back to `bytes` (used to drop an incomplete trailing group).
  void truncate_to(std::uint64_t bytes, std::uint64_t last_seq);

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void open();

  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::uint64_t last_seq_;
  bool sync_;
};

}  // namespace seaas
