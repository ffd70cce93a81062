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

#include "seaas/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string_view>

#include "seaas/detection.hpp"
#include "seaas/errors.hpp"

namespace seaas {

namespace {

struct RuleSpec {
  const char* id;
  std::int64_t priority;
  const char* app;
  const char* resource;
  const char* action;
  const char* state;  // "" for any
  RuleDecision decision;
  std::optional<Constraints> constraints = std::nullopt;
  std::optional<TimeWindow> window = std::nullopt;
};

constexpr auto G = RuleDecision::kGrant;
constexpr auto D = RuleDecision::kDeny;
constexpr auto S = RuleDecision::kSelective;
constexpr std::int64_t kHourMs = 3'600'000;

Constraints rate(std::uint32_t count, std::uint32_t window_s, bool redact = false) {
  Constraints c;
  c.max_per_window = RateWindow{count, window_s};
  c.redact = redact;
  return c;
}

Constraints foreground_only() {
  Constraints c;
  c.foreground_only = true;
  return c;
}

const std::vector<RuleSpec>& pack_specs() {
  static const std::vector<RuleSpec> specs = {
      {"chat-camera", 100, "com.social.chat", "CAMERA", "*", "FOREGROUND", G},
      {"chat-microphone", 100, "com.social.chat", "MICROPHONE", "*", "FOREGROUND", G},
      {"chat-photos", 100, "com.social.chat", "PHOTOS", "*", "", G},
      {"chat-contacts", 100, "com.social.chat", "CONTACTS", "READ", "", G},
      {"maps-gps", 100, "com.maps.nav", "GPS", "*", "", G},
      {"music-microphone", 100, "com.music.player", "MICROPHONE", "RECORD", "FOREGROUND", G},
      {"bank-identity", 100, "com.bank.app", "DEVICE_IDENTITY", "READ", "FOREGROUND", G},
      {"bank-camera", 100, "com.bank.app", "CAMERA", "RECORD", "FOREGROUND", G},
      {"mail-contacts", 100, "com.work.mail", "CONTACTS", "*", "", G},
      {"mail-identity-daytime", 100, "com.work.mail", "DEVICE_IDENTITY", "READ", "", G, std::nullopt,
       TimeWindow{8 * kHourMs, 20 * kHourMs}},
      {"fitness-accelerometer", 100, "com.fitness.*", "ACCELEROMETER", "*", "", S, rate(50, 60)},
      {"fitness-gyroscope", 100, "com.fitness.*", "GYROSCOPE", "*", "", S, rate(50, 60, true)},
      {"fitness-gps", 100, "com.fitness.*", "GPS", "READ", "", G},
      {"dialer-call-log", 100, "com.phone.dialer", "CALL_LOG", "*", "", G},
      {"dialer-contacts", 100, "com.phone.dialer", "CONTACTS", "*", "", G},
      {"dialer-microphone", 100, "com.phone.dialer", "MICROPHONE", "*", "", G},
      {"messenger-sms", 100, "com.messenger.sms", "SMS", "*", "", G},
      {"messenger-contacts", 100, "com.messenger.sms", "CONTACTS", "READ", "", G},
      {"editor-camera", 100, "com.photo.editor", "CAMERA", "*", "FOREGROUND", G},
      {"editor-photos", 100, "com.photo.editor", "PHOTOS", "*", "", S, foreground_only()},
      {"weather-gps", 100, "com.weather.app", "GPS", "READ", "FOREGROUND", G},
      {"video-camera", 100, "com.video.call", "CAMERA", "*", "FOREGROUND", G},
      {"video-microphone", 100, "com.video.call", "MICROPHONE", "*", "FOREGROUND", G},
      {"backup-photos", 100, "com.cloud.backup", "PHOTOS", "READ", "", G},
      {"backup-contacts", 100, "com.cloud.backup", "CONTACTS", "READ", "", G},
      {"notes-microphone", 100, "com.notes.app", "MICROPHONE", "RECORD", "FOREGROUND", G},
      {"shop-camera", 100, "com.shop.app", "CAMERA", "RECORD", "FOREGROUND", G},
      {"translate-microphone", 100, "com.translate.app", "MICROPHONE", "RECORD", "FOREGROUND", G},
      {"ride-gps", 100, "com.ride.share", "GPS", "*", "", G},
      {"ride-identity", 100, "com.ride.share", "DEVICE_IDENTITY", "READ", "FOREGROUND", G},
      {"game-microphone", 500, "com.game.*", "MICROPHONE", "*", "", D},
      {"game-camera", 500, "com.game.*", "CAMERA", "*", "", D},
      {"game-contacts", 500, "com.game.*", "CONTACTS", "*", "", D},
      {"game-gps", 500, "com.game.*", "GPS", "*", "", D},
      {"game-sms", 500, "com.game.*", "SMS", "*", "", D},
      {"flashlight-software", 500, "com.flashlight.*", "category:SOFTWARE", "*", "", D},
      {"flashlight-microphone", 500, "com.flashlight.*", "MICROPHONE", "*", "", D},
      {"flashlight-camera-background", 500, "com.flashlight.*", "CAMERA", "*", "BACKGROUND", D},
      {"flashlight-gps", 500, "com.flashlight.*", "GPS", "*", "", D},
      {"free-sms", 500, "com.free.*", "SMS", "*", "", D},
      {"free-call-log", 500, "com.free.*", "CALL_LOG", "*", "", D},
      {"free-contacts", 500, "com.free.*", "CONTACTS", "*", "", D},
      {"free-identity", 500, "com.free.*", "DEVICE_IDENTITY", "*", "", D},
      {"cleaner-photos-transmit", 500, "com.cleaner.*", "PHOTOS", "TRANSMIT", "", D},
      {"cleaner-contacts", 500, "com.cleaner.*", "CONTACTS", "*", "", D},
      {"cleaner-identity", 500, "com.cleaner.*", "DEVICE_IDENTITY", "*", "", D},
      {"wallpaper-hardware-background", 500, "com.wallpaper.*", "category:HARDWARE", "*", "BACKGROUND", D},
      {"wallpaper-contacts", 500, "com.wallpaper.*", "CONTACTS", "*", "", D},
      {"any-identity-transmit-background", 400, "*", "DEVICE_IDENTITY", "TRANSMIT", "BACKGROUND", D},
      {"any-sms-transmit-background", 400, "*", "SMS", "TRANSMIT", "BACKGROUND", D},
      {"any-call-log-transmit-background", 400, "*", "CALL_LOG", "TRANSMIT", "BACKGROUND", D},
      {"vpn-identity", 500, "com.vpn.*", "DEVICE_IDENTITY", "*", "", D},
      {"vpn-contacts", 500, "com.vpn.*", "CONTACTS", "*", "", D},
      {"keyboard-microphone", 500, "com.keyboard.*", "MICROPHONE", "*", "", D},
      {"keyboard-contacts", 500, "com.keyboard.*", "CONTACTS", "*", "", D},
      {"quiz-camera", 500, "com.quiz.*", "CAMERA", "*", "", D},
      {"quiz-microphone", 500, "com.quiz.*", "MICROPHONE", "*", "", D},
      {"quiz-photos", 500, "com.quiz.*", "PHOTOS", "*", "", D},
      {"settings-all", 50, "com.android.settings", "*", "READ", "FOREGROUND", G},
      {"launcher-wifi", 50, "com.home.launcher", "WIFI_RADIO", "READ", "", G},
      {"calendar-app", 50, "com.calendar.app", "CALENDAR", "*", "", G},
      {"any-accelerometer-read", 10, "*", "ACCELEROMETER", "READ", "", G},
      {"sdk-wifi", 50, "com.sdk.*", "WIFI_RADIO", "*", "", S, rate(120, 60)},
      {"editor-camera-night", 200, "com.photo.editor", "CAMERA", "*", "", D, std::nullopt,
       TimeWindow{0, 6 * kHourMs}},
  };
  return specs;
}

PolicyRule build_rule(const RuleSpec& spec) {
  PolicyRule r;
  r.id = spec.id;
  r.priority = spec.priority;
  r.app = AppSelector::parse(spec.app);
  r.resource = ResourceSelector::parse(spec.resource);
  r.action = ActionSelector::parse(spec.action);
  if (std::string_view(spec.state).size() > 0) r.when.app_state = parse_app_state(spec.state);
  r.when.time_window = spec.window;
  r.decision = spec.decision;
  if (spec.constraints) r.constraints = *spec.constraints;
  return r;
}

PolicySet build_pack(const std::vector<std::string_view>& ids) {
  std::vector<PolicyRule> rules;
  for (const auto& spec : pack_specs()) {
    if (ids.empty() || std::find(ids.begin(), ids.end(), spec.id) != ids.end()) rules.push_back(build_rule(spec));
  }
  return PolicySet(1, std::move(rules), PolicyDefaults{});
}

// --- generation ---------------------------------------------------------------------------

// 2026-03-02T09:00:00Z; sessions run through the morning.
constexpr std::int64_t kSessionStartMs = 1'772'409'600'000 + 9 * kHourMs;
constexpr std::int64_t kSessionLengthMs = 45 * 60'000;

struct BenignApp {
  const char* app;
  std::vector<Resource> resources;
};

const std::vector<BenignApp>& benign_catalog() {
  using R = Resource;
  static const std::vector<BenignApp> catalog = {
      {"com.social.chat", {R::kCamera, R::kMicrophone, R::kPhotos, R::kContacts, R::kWifiRadio}},
      {"com.maps.nav", {R::kGps, R::kWifiRadio, R::kAccelerometer, R::kGyroscope}},
      {"com.music.player", {R::kMicrophone, R::kWifiRadio}},
      {"com.bank.app", {R::kDeviceIdentity, R::kCamera, R::kWifiRadio}},
      {"com.work.mail", {R::kContacts, R::kDeviceIdentity, R::kCalendar, R::kWifiRadio}},
      {"com.fitness.run", {R::kAccelerometer, R::kGyroscope, R::kGps}},
      {"com.phone.dialer", {R::kCallLog, R::kContacts, R::kMicrophone}},
      {"com.messenger.sms", {R::kSms, R::kContacts}},
      {"com.photo.editor", {R::kCamera, R::kPhotos}},
      {"com.weather.app", {R::kGps, R::kWifiRadio}},
      {"com.video.call", {R::kCamera, R::kMicrophone, R::kWifiRadio}},
      {"com.cloud.backup", {R::kPhotos, R::kContacts, R::kWifiRadio}},
      {"com.notes.app", {R::kMicrophone, R::kCalendar}},
      {"com.shop.app", {R::kCamera, R::kWifiRadio}},
      {"com.translate.app", {R::kMicrophone, R::kWifiRadio}},
      {"com.ride.share", {R::kGps, R::kDeviceIdentity, R::kWifiRadio}},
      {"com.calendar.app", {R::kCalendar}},
      {"com.home.launcher", {R::kWifiRadio, R::kAccelerometer}},
  };
  return catalog;
}

constexpr const char* kMaliciousFamilies[] = {"game", "flashlight", "free", "cleaner", "wallpaper", "vpn", "quiz"};
constexpr const char* kWords[] = {"puzzle", "blaster", "hero",  "torch",  "saver", "boost",  "master",
                                  "turbo",  "magic",   "pixel", "shield", "swift", "galaxy", "ninja"};
constexpr Resource kBurstResources[] = {Resource::kWifiRadio, Resource::kAccelerometer, Resource::kGyroscope,
                                        Resource::kCalendar};
constexpr Resource kCovertResources[] = {Resource::kCalendar, Resource::kWifiRadio, Resource::kAccelerometer,
                                         Resource::kGyroscope};

struct Tuple {
  Resource resource;
  Action action;
  AppState state;
};

class Generator {
 public:
  Generator(const PolicySet& pack, std::uint64_t seed) : pack_(pack), rng_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  double uniform_real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))]; }

  // What the engine would say about one isolated access.
  std::optional<ThreatReport> probe(const std::string& app, const Tuple& t, std::uint64_t window_count,
                                    Verdict* verdict = nullptr) const {
    AccessEvent e{1, "probe", app, t.resource, t.action, t.state, kSessionStartMs, 0};
    const auto d = evaluate(pack_, e);
    if (verdict != nullptr) *verdict = d.verdict;
    return detect(e, d, window_count, pack_);
  }

  std::vector<Tuple> tuples(const std::string& app, const std::vector<Resource>& resources, bool want_threat) const {
    std::vector<Tuple> out;
    for (Resource r : resources) {
      for (Action a : kAllActions) {
        for (AppState s : {AppState::kForeground, AppState::kBackground}) {
          Tuple t{r, a, s};
          Verdict v{};
          auto threat = probe(app, t, 1, &v);
          if (want_threat ? threat && threat->severity == Severity::kHigh : !threat && v != Verdict::kDeny) {
            out.push_back(t);
          }
        }
      }
    }
    return out;
  }

  ScriptedEvent event(std::int64_t at, const std::string& app, const Tuple& t, ScenarioLabel label) {
    return ScriptedEvent{at, app, t.resource, t.action, t.state, static_cast<std::uint64_t>(uniform(64, 4096)),
                         label};
  }

  // Benign traffic from installed apps, at least 3 s apart per app.
  void benign(std::vector<ScriptedEvent>& out) {
    auto catalog = benign_catalog();
    std::shuffle(catalog.begin(), catalog.end(), rng_);
    const auto installed = static_cast<std::size_t>(uniform(6, 9));
    for (std::size_t k = 0; k < installed; ++k) {
      const auto& app = catalog[k];
      const auto options = tuples(app.app, app.resources, false);
      if (options.empty()) continue;
      std::int64_t at = kSessionStartMs + uniform(0, 60'000);
      const auto count = uniform(15, 35);
      for (std::int64_t i = 0; i < count && at < kSessionStartMs + kSessionLengthMs; ++i) {
        out.push_back(event(at, app.app, pick(options), ScenarioLabel::kBenign));
        at += uniform(3'000, 90'000);
      }
    }
  }

  std::string app_name(const char* family, std::size_t serial) {
    return std::string("com.") + family + "." + kWords[uniform(0, std::size(kWords) - 1)] + std::to_string(serial);
  }

  // Over-reaching apps: up to three HIGH threats on distinct resources, then silence.
  std::uint64_t malicious(std::vector<ScriptedEvent>& out, std::size_t serial) {
    const char* family = kMaliciousFamilies[uniform(0, std::size(kMaliciousFamilies) - 1)];
    const auto app = app_name(family, serial);
    std::vector<Resource> all(std::begin(kAllResources), std::end(kAllResources));
    auto threats = tuples(app, all, true);
    std::shuffle(threats.begin(), threats.end(), rng_);
    std::set<Resource> used;
    std::vector<Tuple> chosen;
    const auto want = static_cast<std::size_t>(uniform(1, 3));
    for (const auto& t : threats) {
      if (chosen.size() == want) break;
      if (used.insert(t.resource).second) chosen.push_back(t);
    }

    std::int64_t at = kSessionStartMs + uniform(0, kSessionLengthMs / 2);
    const auto normal = tuples(app, {Resource::kAccelerometer, Resource::kWifiRadio}, false);
    for (auto i = uniform(0, 4); i > 0 && !normal.empty(); --i) {
      out.push_back(event(at, app, pick(normal), ScenarioLabel::kBenign));
      at += uniform(5'000, 60'000);
    }
    for (const auto& t : chosen) {
      const auto threat = probe(app, t, 1);
      const auto label = threat->threat_type == ThreatType::kPolicyViolation ? ScenarioLabel::kPolicyViolation
                                                                             : ScenarioLabel::kBackgroundExfiltration;
      out.push_back(event(at, app, t, label));
      at += uniform(10'000, 240'000);
    }
    return chosen.size();
  }

  // A tight loop on a normal resource; accesses past the threshold are threats.
  std::uint64_t burst(std::vector<ScriptedEvent>& out, std::size_t serial) {
    const auto app = app_name(uniform(0, 1) == 0 ? "sdk" : "adnet", serial);
    const Tuple t{kBurstResources[uniform(0, std::size(kBurstResources) - 1)],
                  uniform(0, 1) == 0 ? Action::kRead : Action::kTransmit,
                  uniform(0, 1) == 0 ? AppState::kForeground : AppState::kBackground};
    const auto length = uniform(34, 44);
    std::int64_t at = kSessionStartMs + uniform(0, kSessionLengthMs - 60'000);
    std::uint64_t threats = 0;
    for (std::int64_t i = 1; i <= length; ++i) {
      const bool over = probe(app, t, static_cast<std::uint64_t>(i)).has_value();
      out.push_back(event(at, app, t, over ? ScenarioLabel::kAnomalousFrequency : ScenarioLabel::kBenign));
      threats += over ? 1 : 0;
      at += 1'000;
    }
    return threats;
  }

  // A legitimate app touching a critical resource from the background.
  void false_alarm(std::vector<ScriptedEvent>& out) {
    const Tuple t{Resource::kMicrophone, Action::kRecord, AppState::kBackground};
    if (!probe("com.music.player", t, 1)) return;
    out.push_back(event(kSessionStartMs + uniform(0, kSessionLengthMs), "com.music.player", t, ScenarioLabel::kBenign));
  }

  // Background reads of normal resources the pack has no rule for.
  void covert(std::vector<ScriptedEvent>& out, std::size_t count, std::size_t serial) {
    const auto app = app_name("keyboard", serial);
    std::vector<Resource> resources(std::begin(kCovertResources), std::end(kCovertResources));
    std::vector<Tuple> options;
    for (const auto& t : tuples(app, resources, false)) {
      if (t.state == AppState::kBackground && t.action != Action::kWrite) options.push_back(t);
    }
    std::int64_t at = kSessionStartMs + uniform(0, kSessionLengthMs / 2);
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(event(at, app, pick(options), ScenarioLabel::kBackgroundExfiltration));
      at += uniform(20'000, 120'000);
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const PolicySet& pack_;
  std::mt19937_64 rng_;
};

}  // namespace

PolicySet default_policy_pack() { return build_pack({}); }

PolicySet small_policy_pack() {
  return build_pack({"chat-camera", "chat-microphone", "maps-gps", "dialer-call-log", "dialer-contacts",
                     "game-microphone", "game-camera", "game-contacts", "game-gps", "game-sms", "free-sms",
                     "free-call-log", "free-contacts", "free-identity", "flashlight-software", "cleaner-contacts"});
}

Suite generate_suite(const PolicySet& pack, const SuiteSpec& spec) {
  Generator gen(pack, spec.seed);
  Suite suite;
  for (std::uint32_t trial = 1; trial <= spec.trials; ++trial) {
    std::vector<std::vector<ScriptedEvent>> users;
    std::uint64_t detectable = 0;
    for (int attempt = 0; attempt < 100; ++attempt) {
      users.assign(spec.users, {});
      detectable = 0;
      std::size_t serial = 1;
      for (auto& events : users) {
        gen.benign(events);
        for (auto n = gen.uniform(2, 3); n > 0; --n) detectable += gen.malicious(events, serial++);
        for (auto n = gen.uniform(1, 2); n > 0; --n) detectable += gen.burst(events, serial++);
        if (gen.uniform(0, 99) < 35) gen.false_alarm(events);
      }
      if (detectable >= spec.min_threats_per_trial) break;
    }
    if (detectable < spec.min_threats_per_trial) throw TrialInvalid("cannot reach the threat floor");

    const double ratio = gen.uniform_real(spec.min_ratio, spec.max_ratio);
    const auto covert_total = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(detectable / ratio)));
    std::vector<std::size_t> share(users.size(), 0);
    for (std::uint64_t i = 0; i < covert_total; ++i) ++share[static_cast<std::size_t>(gen.uniform(0, spec.users - 1))];
    for (std::size_t u = 0; u < users.size(); ++u) {
      if (share[u] > 0) gen.covert(users[u], share[u], 900 + u);
    }

    std::vector<UserScript> scripts;
    for (std::size_t u = 0; u < users.size(); ++u) {
      auto& events = users[u];
      std::stable_sort(events.begin(), events.end(),
                       [](const ScriptedEvent& a, const ScriptedEvent& b) { return a.at_ms < b.at_ms; });
      char name[32];
      std::snprintf(name, sizeof name, "user_%02zu", u + 1);
      scripts.push_back(UserScript{name, ScenarioScript{std::move(events)}});
    }
    suite.emplace_back(trial, std::move(scripts));
  }
  return suite;
}

void write_suite(const Suite& suite, const std::filesystem::path& dir) {
  for (const auto& [trial, users] : suite) {
    const auto trial_dir = dir / ("trial_" + std::to_string(trial));
    std::filesystem::create_directories(trial_dir);
    for (const auto& u : users) {
      std::ofstream out(trial_dir / (u.name + ".jsonl"), std::ios::binary | std::ios::trunc);
      if (!out) throw ExportError("cannot write " + (trial_dir / u.name).string());
      out << serialize_scenario(u.script);
    }
  }
}

}  // namespace seaas
