// Copyright 2026 The dotref Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DOTREF_WORLD_H_
#define DOTREF_WORLD_H_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace dotref {

// Geometry and attribute constants of generated worlds. Views are unit
// circles; everything else is expressed in units of the view radius.
inline constexpr double kViewRadius = 1.0;
inline constexpr double kMinCenterOffset = 0.2;  // times kViewRadius
inline constexpr double kMaxCenterOffset = 1.2;
inline constexpr double kMinEntityDistance = 0.12;
inline constexpr double kBoundaryMargin = 0.03;
inline constexpr int kMaxRejectRounds = 10000;

inline constexpr double kSizeMin = 8.0;
inline constexpr double kSizeRange = 7.0;
inline constexpr double kSizeMax = kSizeMin + kSizeRange;
inline constexpr double kColorMin = 25.0;   // darkest
inline constexpr double kColorMax = 205.0;  // lightest

inline constexpr int kEntitiesPerView = 7;
inline constexpr int kNumAgents = 2;
inline constexpr int kObservationSize = 4 * kEntitiesPerView;

using EntityId = int;
using Agent = int;  // 0 or 1

struct Entity {
  EntityId id = 0;
  double x = 0;
  double y = 0;
  double size = 0;
  double color = 0;

  bool operator==(const Entity&) const = default;
};

struct AgentView {
  double center_x = 0;
  double center_y = 0;
  double radius = kViewRadius;
  std::vector<EntityId> visible_ids;  // ascending

  bool operator==(const AgentView&) const = default;
};

struct World {
  std::string world_id;
  int num_shared = 0;
  std::vector<Entity> entities;  // ascending by id
  std::array<AgentView, kNumAgents> views;
  std::uint64_t seed = 0;

  const Entity& entity(EntityId id) const;
  bool Visible(Agent agent, EntityId id) const;
  std::vector<EntityId> SharedIds() const;

  bool operator==(const World&) const = default;
};

// One row per visible entity, ordered by id.
struct ObservationRow {
  double x_rel = 0;
  double y_rel = 0;
  double size_norm = 0;
  double color_norm = 0;

  bool operator==(const ObservationRow&) const = default;
};

struct Observation {
  Agent agent = 0;
  std::array<ObservationRow, kEntitiesPerView> rows;
  std::array<EntityId, kEntitiesPerView> entity_ids;

  std::array<double, kObservationSize> Flatten() const;
  // Slot index of `id` in this view, or -1.
  int SlotOf(EntityId id) const;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic in (num_shared, seed). num_shared must be 4, 5 or 6.
// Throws std::invalid_argument for other num_shared and GenerationError if
// no valid placement is found within kMaxRejectRounds.
World GenerateWorld(int num_shared, std::uint64_t seed);

Observation Observe(const World& world, Agent agent);

double NormalizeSize(double size);
double NormalizeColor(double color);

struct Violation {
  std::string invariant;
  std::vector<EntityId> ids;
  std::string detail;
};

// Empty iff every structural invariant of a generated world holds.
std::vector<Violation> ValidateWorld(const World& world);

void to_json(nlohmann::json& j, const Entity& e);
void from_json(const nlohmann::json& j, Entity& e);
void to_json(nlohmann::json& j, const AgentView& v);
void from_json(const nlohmann::json& j, AgentView& v);
void to_json(nlohmann::json& j, const World& w);
void from_json(const nlohmann::json& j, World& w);

}  // namespace dotref

#endif  // DOTREF_WORLD_H_
