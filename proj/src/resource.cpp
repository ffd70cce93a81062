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

#include "seaas/resource.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <string>

#include "seaas/errors.hpp"

namespace seaas {
namespace {

constexpr std::array<std::string_view, kResourceCount> kResourceNames = {
    "MICROPHONE", "GPS",             "CAMERA",   "ACCELEROMETER", "GYROSCOPE", "WIFI_RADIO",
    "DEVICE_IDENTITY", "CONTACTS",   "PHOTOS",   "SMS",           "CALL_LOG",  "CALENDAR",
};

}  // namespace

std::string_view to_string(Resource r) noexcept {
  return kResourceNames[static_cast<std::size_t>(r)];
}

std::string_view to_string(ResourceCategory c) noexcept {
  return c == ResourceCategory::kHardware ? "HARDWARE" : "SOFTWARE";
}

std::string_view to_string(Criticality c) noexcept {
  return c == Criticality::kCritical ? "CRITICAL" : "NORMAL";
}

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::kRead: return "READ";
    case Action::kWrite: return "WRITE";
    case Action::kRecord: return "RECORD";
    case Action::kTransmit: return "TRANSMIT";
  }
  return "READ";
}

std::string_view to_string(AppState s) noexcept {
  return s == AppState::kForeground ? "FOREGROUND" : "BACKGROUND";
}

std::optional<Resource> try_parse_resource(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kResourceNames.size(); ++i) {
    if (kResourceNames[i] == name) return static_cast<Resource>(i);
  }
  return std::nullopt;
}

Resource parse_resource(std::string_view name) {
  if (auto r = try_parse_resource(name)) return *r;
  throw UnknownResource("unknown resource '" + std::string(name) + "'");
}

ResourceCategory parse_category(std::string_view name) {
  if (name == "HARDWARE") return ResourceCategory::kHardware;
  if (name == "SOFTWARE") return ResourceCategory::kSoftware;
  throw MalformedEvent("unknown resource category '" + std::string(name) + "'");
}

Criticality parse_criticality(std::string_view name) {
  if (name == "CRITICAL") return Criticality::kCritical;
  if (name == "NORMAL") return Criticality::kNormal;
  throw MalformedEvent("unknown criticality '" + std::string(name) + "'");
}

Action parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (to_string(a) == name) return a;
  }
  throw MalformedEvent("unknown action '" + std::string(name) + "'");
}

AppState parse_app_state(std::string_view name) {
  if (name == "FOREGROUND") return AppState::kForeground;
  if (name == "BACKGROUND") return AppState::kBackground;
  throw MalformedEvent("unknown app state '" + std::string(name) + "'");
}

ResourceCategory category_of(Resource r) noexcept {
  switch (r) {
    case Resource::kMicrophone:
    case Resource::kGps:
    case Resource::kCamera:
    case Resource::kAccelerometer:
    case Resource::kGyroscope:
    case Resource::kWifiRadio:
    case Resource::kDeviceIdentity:
      return ResourceCategory::kHardware;
    default:
      return ResourceCategory::kSoftware;
  }
}

Criticality classify_criticality(Resource r) noexcept {
  switch (r) {
    case Resource::kMicrophone:
    case Resource::kGps:
    case Resource::kCamera:
    case Resource::kContacts:
    case Resource::kPhotos:
    case Resource::kSms:
    case Resource::kCallLog:
    case Resource::kDeviceIdentity:
      return Criticality::kCritical;
    default:
      return Criticality::kNormal;
  }
}

Criticality classify_criticality(std::string_view name) {
  return classify_criticality(parse_resource(name));
}

ResourceSet ResourceSet::all() noexcept {
  ResourceSet s;
  for (Resource r : kAllResources) s.insert(r);
  return s;
}

std::size_t ResourceSet::size() const noexcept { return std::popcount(bits_); }

std::vector<Resource> ResourceSet::to_vector() const {
  std::vector<Resource> out;
  for (Resource r : kAllResources) {
    if (contains(r)) out.push_back(r);
  }
  return out;
}

bool is_valid_app_id(std::string_view app_id) noexcept {
  if (app_id.empty()) return false;
  return std::none_of(app_id.begin(), app_id.end(),
                      [](unsigned char c) { return std::isspace(c) != 0 || c < 0x20; });
}

ValidatedEvent validate_event(const AccessEvent& event, const DeviceDescriptor& device,
                              std::uint64_t last_seq) {
  if (!is_valid_app_id(event.app_id)) {
    throw MalformedEvent("malformed app id '" + event.app_id + "'");
  }
  if (event.device_id != device.device_id) {
    throw MalformedEvent("event for device '" + event.device_id + "' sent on session of '" +
                         device.device_id + "'");
  }
  if (!device.resource_inventory.contains(event.resource)) {
    throw InventoryMismatch("device '" + device.device_id + "' has no " +
                            std::string(to_string(event.resource)));
  }
  return ValidatedEvent{event, event.event_seq <= last_seq};
}

}  // namespace seaas
