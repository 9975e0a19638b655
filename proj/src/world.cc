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

#include "dotref/world.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "dotref/random.h"

namespace dotref {

namespace {

constexpr int kMaxPointAttempts = 1000;

struct Point {
  double x;
  double y;
};

double Distance(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
};

// Places `count` points inside `region` (bounding box `box`), each at least
// kMinEntityDistance from every point already in `placed`. Returns false if
// some point could not be placed.
bool PlacePoints(Rng& rng, int count, const Box& box,
                 const std::function<bool(double, double)>& region,
                 std::vector<Point>& placed) {
  const double min_dist = kMinEntityDistance * kViewRadius;
  for (int n = 0; n < count; ++n) {
    bool ok = false;
    for (int attempt = 0; attempt < kMaxPointAttempts && !ok; ++attempt) {
      const double x = rng.Uniform(box.x_lo, box.x_hi);
      const double y = rng.Uniform(box.y_lo, box.y_hi);
      if (!region(x, y)) continue;
      ok = std::all_of(placed.begin(), placed.end(), [&](const Point& p) {
        return Distance(x, y, p.x, p.y) >= min_dist;
      });
      if (ok) placed.push_back({x, y});
    }
    if (!ok) return false;
  }
  return true;
}

// Positions for one rejection round: shared points first, then the
// exclusive points of agent 0, then of agent 1.
std::optional<std::vector<Point>> SamplePositions(Rng& rng, int num_shared,
                                                  double offset) {
  const double inner = kViewRadius * (1.0 - kBoundaryMargin);
  const double outer = kViewRadius * (1.0 + kBoundaryMargin);
  const double half = offset / 2;
  const Point c0{-half, 0.0};
  const Point c1{half, 0.0};
  auto within = [](const Point& c, double r) {
    return [c, r](double x, double y) { return Distance(x, y, c.x, c.y) <= r; };
  };
  auto outside = [](const Point& c, double r) {
    return [c, r](double x, double y) { return Distance(x, y, c.x, c.y) >= r; };
  };

  const double lens_half_height = std::sqrt(inner * inner - half * half);
  const Box lens_box{half - inner, inner - half, -lens_half_height,
                     lens_half_height};
  auto in_lens = [&](double x, double y) {
    return within(c0, inner)(x, y) && within(c1, inner)(x, y);
  };

  std::vector<Point> placed;
  placed.reserve(2 * kEntitiesPerView - num_shared);
  if (!PlacePoints(rng, num_shared, lens_box, in_lens, placed)) {
    return std::nullopt;
  }
  const int exclusive = kEntitiesPerView - num_shared;
  const std::array<Point, 2> centers{c0, c1};
  for (int agent = 0; agent < kNumAgents; ++agent) {
    const Point& own = centers[agent];
    const Point& other = centers[1 - agent];
    const Box box{own.x - inner, own.x + inner, -inner, inner};
    auto in_crescent = [&](double x, double y) {
      return within(own, inner)(x, y) && outside(other, outer)(x, y);
    };
    if (!PlacePoints(rng, exclusive, box, in_crescent, placed)) {
      return std::nullopt;
    }
  }
  return placed;
}

std::string MakeWorldId(int num_shared, std::uint64_t seed) {
  std::ostringstream os;
  os << "k" << num_shared << "-s" << seed;
  return os.str();
}

}  // namespace

const Entity& World::entity(EntityId id) const {
  auto it = std::lower_bound(
      entities.begin(), entities.end(), id,
      [](const Entity& e, EntityId value) { return e.id < value; });
  if (it == entities.end() || it->id != id) {
    throw std::out_of_range("no entity with id " + std::to_string(id));
  }
  return *it;
}

bool World::Visible(Agent agent, EntityId id) const {
  const auto& ids = views.at(agent).visible_ids;
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<EntityId> World::SharedIds() const {
  std::vector<EntityId> shared;
  std::set_intersection(views[0].visible_ids.begin(),
                        views[0].visible_ids.end(),
                        views[1].visible_ids.begin(),
                        views[1].visible_ids.end(), std::back_inserter(shared));
  return shared;
}

std::array<double, kObservationSize> Observation::Flatten() const {
  std::array<double, kObservationSize> flat{};
  for (int i = 0; i < kEntitiesPerView; ++i) {
    flat[4 * i + 0] = rows[i].x_rel;
    flat[4 * i + 1] = rows[i].y_rel;
    flat[4 * i + 2] = rows[i].size_norm;
    flat[4 * i + 3] = rows[i].color_norm;
  }
  return flat;
}

int Observation::SlotOf(EntityId id) const {
  for (int i = 0; i < kEntitiesPerView; ++i) {
    if (entity_ids[i] == id) return i;
  }
  return -1;
}

World GenerateWorld(int num_shared, std::uint64_t seed) {
  if (num_shared < 4 || num_shared > 6) {
    throw std::invalid_argument("num_shared must be 4, 5 or 6, got " +
                                std::to_string(num_shared));
  }
  Rng rng(seed);
  for (int round = 0; round < kMaxRejectRounds; ++round) {
    const double offset =
        kViewRadius * rng.Uniform(kMinCenterOffset, kMaxCenterOffset);
    auto positions = SamplePositions(rng, num_shared, offset);
    if (!positions) continue;

    const int n = static_cast<int>(positions->size());
    std::vector<EntityId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    // Ids carry no information about which region an entity came from.
    rng.Shuffle(ids);

    World world;
    world.world_id = MakeWorldId(num_shared, seed);
    world.num_shared = num_shared;
    world.seed = seed;
    world.views[0].center_x = -offset / 2;
    world.views[1].center_x = offset / 2;
    world.entities.resize(n);
    const int exclusive = kEntitiesPerView - num_shared;
    for (int i = 0; i < n; ++i) {
      Entity& e = world.entities[i];
      e.id = ids[i];
      e.x = (*positions)[i].x;
      e.y = (*positions)[i].y;
      e.size = kSizeMin + kSizeRange * rng.Uniform01();
      e.color = rng.Uniform(kColorMin, kColorMax);
      const bool shared = i < num_shared;
      const bool first = i < num_shared + exclusive;
      if (shared || first) world.views[0].visible_ids.push_back(e.id);
      if (shared || !first) world.views[1].visible_ids.push_back(e.id);
    }
    std::sort(world.entities.begin(), world.entities.end(),
              [](const Entity& a, const Entity& b) { return a.id < b.id; });
    for (auto& view : world.views) {
      std::sort(view.visible_ids.begin(), view.visible_ids.end());
    }
    return world;
  }
  throw GenerationError("no valid placement after " +
                        std::to_string(kMaxRejectRounds) + " rounds (k=" +
                        std::to_string(num_shared) +
                        ", seed=" + std::to_string(seed) + ")");
}

double NormalizeSize(double size) {
  return 2.0 * (size - kSizeMin) / kSizeRange - 1.0;
}

double NormalizeColor(double color) {
  return 2.0 * (color - kColorMin) / (kColorMax - kColorMin) - 1.0;
}

Observation Observe(const World& world, Agent agent) {
  const AgentView& view = world.views.at(agent);
  if (view.visible_ids.size() != kEntitiesPerView) {
    throw std::invalid_argument("view of agent " + std::to_string(agent) +
                                " does not hold 7 entities");
  }
  Observation obs;
  obs.agent = agent;
  for (int i = 0; i < kEntitiesPerView; ++i) {
    const Entity& e = world.entity(view.visible_ids[i]);
    obs.entity_ids[i] = e.id;
    obs.rows[i] = {(e.x - view.center_x) / view.radius,
                   (e.y - view.center_y) / view.radius, NormalizeSize(e.size),
                   NormalizeColor(e.color)};
  }
  return obs;
}

std::vector<Violation> ValidateWorld(const World& world) {
  std::vector<Violation> out;
  auto fail = [&](std::string invariant, std::vector<EntityId> ids,
                  std::string detail) {
    out.push_back({std::move(invariant), std::move(ids), std::move(detail)});
  };

  const int k = world.num_shared;
  if (k < 4 || k > 6) {
    fail("num_shared", {}, "num_shared must be in {4,5,6}");
  }
  if (static_cast<int>(world.entities.size()) != 2 * kEntitiesPerView - k) {
    fail("entity_count", {},
         "expected " + std::to_string(2 * kEntitiesPerView - k) +
             " entities, got " + std::to_string(world.entities.size()));
  }

  std::set<EntityId> ids;
  for (std::size_t i = 0; i < world.entities.size(); ++i) {
    const Entity& e = world.entities[i];
    if (!ids.insert(e.id).second) fail("unique_ids", {e.id}, "duplicate id");
    if (i > 0 && world.entities[i - 1].id >= e.id) {
      fail("entity_order", {e.id}, "entities not ascending by id");
    }
    if (!(e.size >= kSizeMin && e.size <= kSizeMax)) {
      fail("size_range", {e.id}, "size " + std::to_string(e.size));
    }
    if (!(e.color >= kColorMin && e.color <= kColorMax)) {
      fail("color_range", {e.id}, "color " + std::to_string(e.color));
    }
  }

  const double inner = kViewRadius * (1.0 - kBoundaryMargin);
  const double outer = kViewRadius * (1.0 + kBoundaryMargin);
  for (int agent = 0; agent < kNumAgents; ++agent) {
    const AgentView& view = world.views[agent];
    const std::string who = "view " + std::to_string(agent) + ": ";
    if (view.visible_ids.size() != kEntitiesPerView) {
      fail("view_size", view.visible_ids,
           who + std::to_string(view.visible_ids.size()) + " visible ids");
    }
    if (!std::is_sorted(view.visible_ids.begin(), view.visible_ids.end()) ||
        std::adjacent_find(view.visible_ids.begin(), view.visible_ids.end()) !=
            view.visible_ids.end()) {
      fail("view_order", view.visible_ids, who + "ids not strictly ascending");
    }
    if (std::abs(view.radius - kViewRadius) > 1e-12) {
      fail("view_radius", {}, who + "radius " + std::to_string(view.radius));
    }
    for (EntityId id : view.visible_ids) {
      if (!ids.count(id)) {
        fail("view_ids_exist", {id}, who + "unknown id");
        continue;
      }
      const Entity& e = world.entity(id);
      if (Distance(e.x, e.y, view.center_x, view.center_y) > inner) {
        fail("inside_margin", {id}, who + "visible entity too close to edge");
      }
    }
    for (const Entity& e : world.entities) {
      if (world.Visible(agent, e.id)) continue;
      if (Distance(e.x, e.y, view.center_x, view.center_y) < outer) {
        fail("outside_margin", {e.id},
             who + "hidden entity too close to the view");
      }
    }
  }

  const auto shared = world.SharedIds();
  if (static_cast<int>(shared.size()) != k) {
    fail("shared_count", shared,
         "views share " + std::to_string(shared.size()) + " ids, expected " +
             std::to_string(k));
  }
  for (const Entity& e : world.entities) {
    if (!world.Visible(0, e.id) && !world.Visible(1, e.id)) {
      fail("observed", {e.id}, "entity visible to no agent");
    }
  }
  for (std::size_t i = 0; i < world.entities.size(); ++i) {
    for (std::size_t j = i + 1; j < world.entities.size(); ++j) {
      const Entity& a = world.entities[i];
      const Entity& b = world.entities[j];
      if (Distance(a.x, a.y, b.x, b.y) < kMinEntityDistance * kViewRadius) {
        fail("min_distance", {a.id, b.id}, "entities too close");
      }
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const Entity& e) {
  j = {{"id", e.id},
       {"x", e.x},
       {"y", e.y},
       {"size", e.size},
       {"color", e.color}};
}

void from_json(const nlohmann::json& j, Entity& e) {
  j.at("id").get_to(e.id);
  j.at("x").get_to(e.x);
  j.at("y").get_to(e.y);
  j.at("size").get_to(e.size);
  j.at("color").get_to(e.color);
}

void to_json(nlohmann::json& j, const AgentView& v) {
  j = {{"center_x", v.center_x},
       {"center_y", v.center_y},
       {"radius", v.radius},
       {"visible_ids", v.visible_ids}};
}

void from_json(const nlohmann::json& j, AgentView& v) {
  j.at("center_x").get_to(v.center_x);
  j.at("center_y").get_to(v.center_y);
  j.at("radius").get_to(v.radius);
  j.at("visible_ids").get_to(v.visible_ids);
}

void to_json(nlohmann::json& j, const World& w) {
  j = {{"world_id", w.world_id},
       {"num_shared", w.num_shared},
       {"entities", w.entities},
       {"views", w.views},
       {"seed", w.seed}};
}

void from_json(const nlohmann::json& j, World& w) {
  j.at("world_id").get_to(w.world_id);
  j.at("num_shared").get_to(w.num_shared);
  j.at("entities").get_to(w.entities);
  j.at("views").get_to(w.views);
  w.seed = j.value("seed", std::uint64_t{0});
}

}  // namespace dotref
