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

#include "seaas/event_log.hpp"

#include <unistd.h>

#include <fstream>

#include <spdlog/spdlog.h>

#include "seaas/errors.hpp"

namespace seaas {

std::string_view to_string(LogKind k) noexcept {
  switch (k) {
    case LogKind::kEvent: return "EVENT";
    case LogKind::kDecision: return "DECISION";
    case LogKind::kThreat: return "THREAT";
    case LogKind::kPolicyChange: return "POLICY_CHANGE";
    case LogKind::kQuarantine: return "QUARANTINE";
    case LogKind::kDevice: return "DEVICE";
  }
  return "EVENT";
}

LogKind parse_log_kind(std::string_view name) {
  for (auto k : {LogKind::kEvent, LogKind::kDecision, LogKind::kThreat, LogKind::kPolicyChange,
                 LogKind::kQuarantine, LogKind::kDevice}) {
    if (to_string(k) == name) return k;
  }
  throw StorageError("unknown log record kind '" + std::string(name) + "'");
}

namespace {

LogRecord parse_record(const std::string& line, std::uint64_t offset) {
  auto j = json::Json::parse(line);
  LogRecord r;
  r.seq = json::get_u64(j, "seq");
  r.kind = parse_log_kind(json::get_string(j, "kind"));
  r.server_ms = json::get_i64(j, "ts");
  r.payload = json::field(j, "payload");
  r.offset = offset;
  return r;
}

}  // namespace

LogReadResult read_log(const std::filesystem::path& file, bool repair) {
  LogReadResult result;
  std::ifstream in(file, std::ios::binary);
  if (!in) return result;
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::uint64_t pos = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = data.substr(pos, complete ? nl - pos : std::string::npos);
    try {
      if (!complete) throw StorageError("record without line terminator");
      LogRecord rec = parse_record(line, pos);
      const std::uint64_t expected = result.records.empty() ? 0 : result.records.back().seq + 1;
      if (expected != 0 && rec.seq != expected) {
        throw StorageError("sequence gap: expected " + std::to_string(expected) + ", found " +
                           std::to_string(rec.seq));
      }
      result.records.push_back(std::move(rec));
      pos = nl + 1;
    } catch (const std::exception& e) {
      const bool is_tail = !complete || nl + 1 == data.size();
      if (!is_tail) {
        throw StorageError(file.string() + ": corrupt record at byte " + std::to_string(pos) + ": " + e.what());
      }
      spdlog::warn("{}: torn final record at byte {} ({}); truncating", file.string(), pos, e.what());
      result.truncated = true;
      break;
    }
  }
  result.valid_bytes = pos;
  if (result.truncated && repair) std::filesystem::resize_file(file, pos);
  return result;
}

EventLog::EventLog(std::filesystem::path file, std::uint64_t last_seq, bool sync)
    : path_(std::move(file)), last_seq_(last_seq), sync_(sync) {
  open();
}

EventLog::~EventLog() {
  if (file_ != nullptr) std::fclose(file_);
}

void EventLog::open() {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  file_ = std::fopen(path_.c_str(), "ab");
  if (file_ == nullptr) throw StorageError("cannot open log " + path_.string());
}

std::uint64_t EventLog::append(const std::vector<std::pair<LogKind, json::Json>>& group,
                               std::int64_t server_ms) {
  std::string chunk;
  std::uint64_t seq = last_seq_;
  for (const auto& [kind, payload] : group) {
    json::Json rec = json::Json::object();
    rec["seq"] = ++seq;
    rec["kind"] = to_string(kind);
    rec["ts"] = server_ms;
    rec["payload"] = payload;
    chunk += rec.dump();
    chunk += '\n';
  }
  if (std::fwrite(chunk.data(), 1, chunk.size(), file_) != chunk.size() || std::fflush(file_) != 0) {
    throw StorageError("write to " + path_.string() + " failed");
  }
  if (sync_) ::fsync(::fileno(file_));
  last_seq_ = seq;
  return seq;
}

void EventLog::truncate_to(std::uint64_t bytes, std::uint64_t last_seq) {
  std::fclose(file_);
  file_ = nullptr;
  std::filesystem::resize_file(path_, bytes);
  last_seq_ = last_seq;
  open();
}

}  // namespace seaas
