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

// Device resource vocabulary: the hardware and software resources an app can
// touch, the access events that describe each attempt, and the fixed
// criticality table the rest of the engine defaults against.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seaas {

enum class Resource : std::uint8_t {
  kMicrophone,
  kGps,
  kCamera,
  kAccelerometer,
  kGyroscope,
  kWifiRadio,
  kDeviceIdentity,
  kContacts,
  kPhotos,
  kSms,
  kCallLog,
  kCalendar,
};

inline constexpr std::size_t kResourceCount = 12;

inline constexpr std::array<Resource, kResourceCount> kAllResources = {
    Resource::kMicrophone, Resource::kGps,           Resource::kCamera,
    Resource::kAccelerometer, Resource::kGyroscope,  Resource::kWifiRadio,
    Resource::kDeviceIdentity, Resource::kContacts,  Resource::kPhotos,
    Resource::kSms,        Resource::kCallLog,       Resource::kCalendar,
};

enum class ResourceCategory : std::uint8_t { kHardware, kSoftware };
enum class Criticality : std::uint8_t { kCritical, kNormal };
enum class Action : std::uint8_t { kRead, kWrite, kRecord, kTransmit };
enum class AppState : std::uint8_t { kForeground, kBackground };

inline constexpr std::array<Action, 4> kAllActions = {Action::kRead, Action::kWrite,
                                                      Action::kRecord, Action::kTransmit};

std::string_view to_string(Resource r) noexcept;
std::string_view to_string(ResourceCategory c) noexcept;
std::string_view to_string(Criticality c) noexcept;
std::string_view to_string(Action a) noexcept;
std::string_view to_string(AppState s) noexcept;

// Parsers throw UnknownResource (resource) or MalformedEvent (others).
Resource parse_resource(std::string_view name);
ResourceCategory parse_category(std::string_view name);
Criticality parse_criticality(std::string_view name);
Action parse_action(std::string_view name);
AppState parse_app_state(std::string_view name);

std::optional<Resource> try_parse_resource(std::string_view name) noexcept;

ResourceCategory category_of(Resource r) noexcept;

/// CRITICAL for MICROPHONE, GPS, CAMERA, CONTACTS, PHOTOS, SMS, CALL_LOG and
/// DEVICE_IDENTITY; NORMAL for the rest.
Criticality classify_criticality(Resource r) noexcept;
/// String form; throws UnknownResource outside the built-in inventory.
Criticality classify_criticality(std::string_view name);

/// Bit set over the built-in inventory.
class ResourceSet {
 public:
  constexpr ResourceSet() = default;

  static ResourceSet all() noexcept;

  void insert(Resource r) noexcept { bits_ |= bit(r); }
  void erase(Resource r) noexcept { bits_ &= static_cast<std::uint16_t>(~bit(r)); }
  bool contains(Resource r) const noexcept { return (bits_ & bit(r)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  std::vector<Resource> to_vector() const;

  friend bool operator==(const ResourceSet&, const ResourceSet&) = default;

 private:
  static constexpr std::uint16_t bit(Resource r) noexcept {
    return static_cast<std::uint16_t>(1U << static_cast<unsigned>(r));
  }
  std::uint16_t bits_ = 0;
};

/// Reverse-domain app identifiers: non-empty, no whitespace.
bool is_valid_app_id(std::string_view app_id) noexcept;

struct DeviceDescriptor {
  std::string device_id;
  ResourceSet resource_inventory = ResourceSet::all();
  std::string agent_version;

  friend bool operator==(const DeviceDescriptor&, const DeviceDescriptor&) = default;
};

struct AccessEvent {
  std::uint64_t event_seq = 0;
  std::string device_id;
  std::string app_id;
  Resource resource = Resource::kMicrophone;
  Action action = Action::kRead;
  AppState app_state = AppState::kForeground;
  std::int64_t at_ms = 0;
  std::uint64_t payload_bytes = 0;

  friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

struct ValidatedEvent {
  AccessEvent event;
  bool duplicate = false;
};

/// Accepts an event iff its resource is in the device inventory and its
/// sequence number is above `last_seq`. Sequence numbers at or below
/// `last_seq` are flagged duplicate rather than rejected so replays stay
/// idempotent. Throws InventoryMismatch or MalformedEvent.
ValidatedEvent validate_event(const AccessEvent& event, const DeviceDescriptor& device,
                              std::uint64_t last_seq);

}  // namespace seaas
