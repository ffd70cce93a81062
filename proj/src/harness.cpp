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

#include "seaas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <thread>

#include "seaas/errors.hpp"
#include "seaas/service.hpp"
#include "seaas/transport.hpp"

namespace seaas {

namespace {

json::Json optional_number(const std::optional<double>& v) { return v ? json::Json(*v) : json::Json(nullptr); }

std::string format_ratio(const std::optional<double>& v) {
  if (!v) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::unique_ptr<Transport> make_transport(const TrialConfig& config, CloudService* service) {
  if (config.server) return std::make_unique<TcpTransport>(*config.server);
  return std::make_unique<LoopbackTransport>(*service);
}

}  // namespace

json::Json to_json(const TrialReport& r) {
  return json::Json{{"trial_id", r.trial_id},
                    {"events_total", r.events_total},
                    {"threats_injected", r.threats_injected},
                    {"detected", r.detected},
                    {"undetected", r.undetected},
                    {"false_positives", r.false_positives},
                    {"detection_ratio", optional_number(r.detection_ratio)},
                    {"detection_rate", optional_number(r.detection_rate)},
                    {"work_units_local", r.work_units_local},
                    {"work_units_offloaded", r.work_units_offloaded},
                    {"work_ratio", optional_number(r.work_ratio)},
                    {"policy_rules", r.policy_rules}};
}

std::string trial_device_id(std::uint32_t trial_id, const std::string& user) {
  return "trial_" + std::to_string(trial_id) + "." + user;
}

DetectionMetrics compute_detection_metrics(std::int64_t detected, std::int64_t undetected) {
  if (detected < 0 || undetected < 0) throw MetricError("threat counts must be non-negative");
  DetectionMetrics m;
  if (undetected > 0) m.ratio = static_cast<double>(detected) / static_cast<double>(undetected);
  if (detected + undetected > 0) {
    m.rate = static_cast<double>(detected) / static_cast<double>(detected + undetected);
  }
  return m;
}

LabelJoin join_labels(const std::map<LabelKey, ScenarioLabel>& labels, const std::vector<ThreatReport>& threats) {
  std::set<LabelKey> reported;
  for (const auto& t : threats) {
    for (auto seq : t.event_seqs) {
      LabelKey key{t.device_id, seq};
      if (!labels.contains(key)) {
        throw TrialInvalid("threat " + std::to_string(t.threat_id) + " names unlabeled event " + t.device_id + "#" +
                           std::to_string(seq));
      }
      reported.insert(std::move(key));
    }
  }
  LabelJoin join;
  for (const auto& [key, label] : labels) {
    const bool hit = reported.contains(key);
    if (label == ScenarioLabel::kBenign) {
      if (hit) ++join.false_positives;
    } else {
      ++join.threats_injected;
      ++(hit ? join.detected : join.undetected);
    }
  }
  return join;
}

TrialReport run_trial(const TrialConfig& config, CloudService* service) {
  std::set<std::string> names;
  for (const auto& u : config.users) {
    if (!names.insert(u.name).second) throw TrialInvalid("duplicate user '" + u.name + "'");
  }

  std::unique_ptr<CloudService> owned;
  std::optional<AdminClient> admin;
  if (config.server) {
    if (!config.admin) throw TrialAborted("remote trials need the admin address");
    try {
      TcpTransport probe(*config.server);
      probe.connect();
      admin.emplace(*config.admin);
      admin->put_policy(serialize_policy_document(config.policy));
    } catch (const TransportError& e) {
      throw TrialAborted(std::string("server unreachable: ") + e.what());
    }
  } else if (service == nullptr) {
    ServiceConfig sc;
    sc.detection = config.detection;
    owned = std::make_unique<CloudService>(sc, config.policy);
    service = owned.get();
  }

  const std::size_t n = config.users.size();
  std::vector<AgentConfig> agents(n, config.agent);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].device.device_id = trial_device_id(config.trial_id, config.users[i].name);
    agents[i].detection = config.detection;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ (std::uint64_t{config.trial_id} << 32));
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<AgentRunReport> offloaded(n);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const auto k = next.fetch_add(1);
      if (k >= n) return;
      const auto i = order[k];
      try {
        auto transport = make_transport(config, service);
        offloaded[i] = run_scenario(config.users[i].script, AgentMode::kOffloaded, transport.get(), config.policy,
                                    agents[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.agents, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  TrialReport report;
  report.trial_id = config.trial_id;
  report.policy_rules = config.policy.rules().size();

  std::map<LabelKey, ScenarioLabel> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& script = config.users[i].script;
    const auto& run = offloaded[i];
    if (run.fallbacks > 0) {
      throw TrialAborted("lost the server during " + agents[i].device.device_id);
    }
    report.events_total += script.events.size();
    report.work_units_offloaded += run.work.total;
    for (std::size_t k = 0; k < script.events.size(); ++k) {
      labels.emplace(LabelKey{run.device_id, run.outcomes[k].event_seq}, script.events[k].label);
    }
    const auto local = run_scenario(script, AgentMode::kLocal, nullptr, config.policy, agents[i]);
    report.work_units_local += local.work.total;
  }

  std::set<std::string> devices;
  for (const auto& a : agents) devices.insert(a.device.device_id);
  std::vector<ThreatReport> threats;
  try {
    for (auto& t : admin ? admin->threats() : service->threats()) {
      if (devices.contains(t.device_id)) threats.push_back(std::move(t));
    }
  } catch (const TransportError& e) {
    throw TrialAborted(std::string("cannot read the threat feed: ") + e.what());
  }

  const auto join = join_labels(labels, threats);
  report.threats_injected = join.threats_injected;
  report.detected = join.detected;
  report.undetected = join.undetected;
  report.false_positives = join.false_positives;
  const auto metrics =
      compute_detection_metrics(static_cast<std::int64_t>(join.detected), static_cast<std::int64_t>(join.undetected));
  report.detection_ratio = metrics.ratio;
  report.detection_rate = metrics.rate;
  if (report.work_units_local > 0) {
    report.work_ratio =
        static_cast<double>(report.work_units_offloaded) / static_cast<double>(report.work_units_local);
  }
  if (report.detected + report.undetected != report.threats_injected) {
    throw TrialInvalid("conservation violated in trial " + std::to_string(report.trial_id));
  }
  if (!config.server) service->record_trial(to_json(report));
  return report;
}

EfficiencyVerdict compare_cpu_modes(const TrialReport& report, double threshold, std::size_t min_rules) {
  if (report.work_units_local == 0) throw ComparisonError("no LOCAL baseline to compare against");
  EfficiencyVerdict v;
  v.threshold = threshold;
  v.work_ratio = static_cast<double>(report.work_units_offloaded) / static_cast<double>(report.work_units_local);
  v.threshold_applied = report.policy_rules >= min_rules;
  v.pass = v.threshold_applied ? v.work_ratio <= threshold : report.work_units_offloaded < report.work_units_local;
  return v;
}

std::string results_csv(const std::vector<TrialReport>& reports) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kResultColumns); ++i) {
    if (i > 0) out += ',';
    out += kResultColumns[i];
  }
  out += '\n';
  for (const auto& r : reports) {
    out += std::to_string(r.trial_id) + ',' + std::to_string(r.events_total) + ',' +
           std::to_string(r.threats_injected) + ',' + std::to_string(r.detected) + ',' +
           std::to_string(r.undetected) + ',' + std::to_string(r.false_positives) + ',' +
           format_ratio(r.detection_ratio) + ',' + format_ratio(r.detection_rate) + ',' +
           std::to_string(r.work_units_local) + ',' + std::to_string(r.work_units_offloaded) + ',' +
           format_ratio(r.work_ratio) + '\n';
  }
  return out;
}

void export_results(const std::vector<TrialReport>& reports, const std::filesystem::path& path) {
  if (reports.empty()) throw ExportError("no reports to export");
  const auto text = results_csv(reports);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExportError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw ExportError("write failed for " + path.string());
}

std::vector<UserScript> load_trial_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<UserScript> users;
  for (const auto& f : files) users.push_back(UserScript{f.stem().string(), load_scenario(f)});
  return users;
}

std::vector<std::pair<std::uint32_t, std::vector<UserScript>>> load_suite(const std::filesystem::path& suite) {
  if (!std::filesystem::is_directory(suite)) throw TrialInvalid("suite directory not found: " + suite.string());
  static const std::regex kTrialDir(R"(trial_(\d+))");
  std::vector<std::pair<std::uint32_t, std::vector<UserScript>>> trials;
  for (const auto& entry : std::filesystem::directory_iterator(suite)) {
    std::smatch m;
    const auto name = entry.path().filename().string();
    if (!entry.is_directory() || !std::regex_match(name, m, kTrialDir)) continue;
    trials.emplace_back(static_cast<std::uint32_t>(std::stoul(m[1].str())), load_trial_dir(entry.path()));
  }
  std::sort(trials.begin(), trials.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (trials.empty()) throw TrialInvalid("no trial_<n> directories under " + suite.string());
  return trials;
}

}  // namespace seaas
