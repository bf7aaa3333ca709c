#pragma once

// Floor-bounded scene of axis-aligned boxes. Origin at the floor centre,
// +x to the right, -z toward the viewer (front), +y up. Objects rest on the
// floor, so an object's AABB spans y in [0, height].

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace vesna::scene {

enum class Errc {
  occupied,
  out_of_bounds,
  unknown_prototype,
  unknown_anchor,
  not_found,
  invalid_token,
  invalid_scene,
};

inline std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::occupied: return "occupied";
    case Errc::out_of_bounds: return "out-of-bounds";
    case Errc::unknown_prototype: return "unknown-prototype";
    case Errc::unknown_anchor: return "unknown-anchor";
    case Errc::not_found: return "not-found";
    case Errc::invalid_token: return "invalid-token";
    case Errc::invalid_scene: return "invalid-scene";
  }
  return "?";
}

/// A rejected scene operation. `subject` names the object involved: the
/// blocker for occupied, the missing name for the lookup failures.
class SceneError : public std::runtime_error {
 public:
  SceneError(Errc code, std::string subject, const std::string& message)
      : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

  Errc code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  Errc code_;
  std::string subject_;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct FloorPoint {
  double x = 0, z = 0;
  friend bool operator==(const FloorPoint&, const FloorPoint&) = default;
};

struct Aabb {
  Vec3 min, max;
};

/// Positive-volume intersection. Touching faces or edges do not count.
inline bool overlaps(const Aabb& a, const Aabb& b) {
  return a.min.x < b.max.x && b.min.x < a.max.x &&  //
         a.min.y < b.max.y && b.min.y < a.max.y &&  //
         a.min.z < b.max.z && b.min.z < a.max.z;
}

struct Footprint {
  double half_width_x = 0;
  double half_depth_z = 0;
  double height_y = 0;
  friend bool operator==(const Footprint&, const Footprint&) = default;
};

inline Aabb box_at(FloorPoint c, const Footprint& f) {
  return {{c.x - f.half_width_x, 0.0, c.z - f.half_depth_z},
          {c.x + f.half_width_x, f.height_y, c.z + f.half_depth_z}};
}

inline bool valid_object_name(std::string_view name) {
  if (name.empty() || name == "." || name == "..") return false;
  if (name.front() == ' ' || name.back() == ' ') return false;
  for (char c : name) {
    if (c == '#' || c == '/' || static_cast<unsigned char>(c) < 0x20) return false;
  }
  return true;
}

class Catalog {
 public:
  void add(const std::string& name, const Footprint& f) {
    if (!valid_object_name(name)) {
      throw std::invalid_argument("catalog: invalid prototype name \"" + name + "\"");
    }
    for (double v : {f.half_width_x, f.half_depth_z, f.height_y}) {
      if (!std::isfinite(v) || v <= 0) {
        throw std::invalid_argument("catalog: \"" + name + "\" extents must be finite and > 0");
      }
    }
    if (!prototypes_.emplace(name, f).second) {
      throw std::invalid_argument("catalog: duplicate prototype \"" + name + "\"");
    }
  }

  const Footprint* find(std::string_view name) const {
    auto it = prototypes_.find(std::string(name));
    return it == prototypes_.end() ? nullptr : &it->second;
  }

  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& [k, v] : prototypes_) out.insert(k);
    return out;
  }

  const std::map<std::string, Footprint>& prototypes() const { return prototypes_; }
  bool empty() const { return prototypes_.empty(); }

 private:
  std::map<std::string, Footprint> prototypes_;
};

struct SceneObject {
  std::string ref_name;
  std::string prototype;
  Vec3 center;
  Footprint footprint;

  Aabb aabb() const { return box_at({center.x, center.z}, footprint); }

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

enum class Column { left, center, right };
enum class Row { front, center, back };
enum class Relation { left_of, right_of, behind, in_front_of };

inline std::optional<Column> parse_column(std::string_view s) {
  if (s == "left") return Column::left;
  if (s == "center") return Column::center;
  if (s == "right") return Column::right;
  return std::nullopt;
}

inline std::optional<Row> parse_row(std::string_view s) {
  if (s == "front") return Row::front;
  if (s == "center") return Row::center;
  if (s == "back") return Row::back;
  return std::nullopt;
}

inline std::optional<Relation> parse_relation(std::string_view s) {
  if (s == "left of") return Relation::left_of;
  if (s == "right of") return Relation::right_of;
  if (s == "behind") return Relation::behind;
  if (s == "in front of") return Relation::in_front_of;
  return std::nullopt;
}

struct GlobalPlacement {
  Column column;
  Row row;
};

struct RelativePlacement {
  Relation relation;
  std::string anchor;
};

using Placement = std::variant<GlobalPlacement, RelativePlacement>;

/// Interprets the two position strings of an add command: a relation in
/// `pos_x` makes `pos_y` the anchor's ref-name, otherwise both are grid
/// tokens.
inline Placement parse_placement(std::string_view pos_x, std::string_view pos_y) {
  if (auto rel = parse_relation(pos_x)) return RelativePlacement{*rel, std::string(pos_y)};
  auto col = parse_column(pos_x);
  auto row = parse_row(pos_y);
  if (!col) {
    throw SceneError(Errc::invalid_token, std::string(pos_x),
                     "\"" + std::string(pos_x) + "\" is not a column or a relation");
  }
  if (!row) {
    throw SceneError(Errc::invalid_token, std::string(pos_y),
                     "\"" + std::string(pos_y) + "\" is not a row");
  }
  return GlobalPlacement{*col, *row};
}

inline constexpr double kDefaultFloor = 30.0;
inline constexpr double kDefaultGap = 0.5;

class Scene {
 public:
  explicit Scene(double floor_width_x = kDefaultFloor, double floor_depth_z = kDefaultFloor,
                 double gap = kDefaultGap)
      : width_(floor_width_x), depth_(floor_depth_z), gap_(gap) {
    if (!std::isfinite(width_) || !std::isfinite(depth_) || width_ <= 0 || depth_ <= 0) {
      throw std::invalid_argument("scene: floor dimensions must be finite and > 0");
    }
    if (!std::isfinite(gap_) || gap_ < 0) throw std::invalid_argument("scene: gap must be >= 0");
  }

  double floor_width_x() const { return width_; }
  double floor_depth_z() const { return depth_; }
  double gap() const { return gap_; }

  const std::vector<SceneObject>& objects() const { return objects_; }
  const std::map<std::string, unsigned>& name_counters() const { return counters_; }

  const SceneObject* find(std::string_view ref) const {
    for (const auto& o : objects_)
      if (o.ref_name == ref) return &o;
    return nullptr;
  }

  std::set<std::string> ref_names() const {
    std::set<std::string> out;
    for (const auto& o : objects_) out.insert(o.ref_name);
    return out;
  }

  bool within_floor(const Aabb& box) const {
    return box.min.x >= -width_ / 2 && box.max.x <= width_ / 2 &&  //
           box.min.z >= -depth_ / 2 && box.max.z <= depth_ / 2;
  }

  /// Snapshot in insertion order.
  std::vector<SceneObject> list_objects() const { return objects_; }

  /// Places a new instance and returns its ref-name. On any error the scene
  /// is left untouched.
  std::string add_object(const Catalog& catalog, const std::string& prototype,
                         const Placement& placement);

  SceneObject remove_object(std::string_view ref) {
    for (auto it = objects_.begin(); it != objects_.end(); ++it) {
      if (it->ref_name == ref) {
        SceneObject removed = std::move(*it);
        objects_.erase(it);
        return removed;
      }
    }
    throw SceneError(Errc::not_found, std::string(ref),
                     "there is no object named " + std::string(ref));
  }

  /// Rebuilds a scene from persisted parts, re-checking every invariant.
  static Scene restore(double width, double depth, double gap, std::vector<SceneObject> objects,
                       std::map<std::string, unsigned> counters);

  friend bool operator==(const Scene&, const Scene&) = default;

 private:
  std::string next_ref_name(const std::string& prototype) const {
    auto it = counters_.find(prototype);
    unsigned k = (it == counters_.end() ? 0u : it->second) + 1;
    return k == 1 ? prototype : prototype + "#" + std::to_string(k);
  }

  double width_;
  double depth_;
  double gap_;
  std::vector<SceneObject> objects_;
  std::map<std::string, unsigned> counters_;
};

/// Cell centre of the 3x3 floor grid.
inline FloorPoint resolve_global(const Scene& scene, Column col, Row row) {
  const double w = scene.floor_width_x(), d = scene.floor_depth_z();
  double x = 0, z = 0;
  switch (col) {
    case Column::left: x = -w / 3; break;
    case Column::center: x = 0; break;
    case Column::right: x = w / 3; break;
  }
  switch (row) {
    case Row::front: z = -d / 3; break;
    case Row::center: z = 0; break;
    case Row::back: z = d / 3; break;
  }
  return {x, z};
}

inline FloorPoint resolve_global(const Scene& scene, std::string_view col, std::string_view row) {
  auto c = parse_column(col);
  if (!c) throw SceneError(Errc::invalid_token, std::string(col), "invalid column \"" + std::string(col) + "\"");
  auto r = parse_row(row);
  if (!r) throw SceneError(Errc::invalid_token, std::string(row), "invalid row \"" + std::string(row) + "\"");
  return resolve_global(scene, *c, *r);
}

/// Centre for a new `prototype` next to `anchor_ref`: offset along one axis
/// by both half-extents plus the scene gap; the other axis is the anchor's.
inline FloorPoint resolve_relative(const Scene& scene, const Catalog& catalog, Relation relation,
                                   std::string_view anchor_ref, std::string_view prototype) {
  const SceneObject* anchor = scene.find(anchor_ref);
  if (!anchor) {
    throw SceneError(Errc::unknown_anchor, std::string(anchor_ref),
                     "there is no object named " + std::string(anchor_ref) + " to use as reference");
  }
  const Footprint* f = catalog.find(prototype);
  if (!f) {
    throw SceneError(Errc::unknown_prototype, std::string(prototype),
                     std::string(prototype) + " is not an available object");
  }
  const auto& a = anchor->footprint;
  FloorPoint p{anchor->center.x, anchor->center.z};
  switch (relation) {
    case Relation::left_of: p.x -= a.half_width_x + f->half_width_x + scene.gap(); break;
    case Relation::right_of: p.x += a.half_width_x + f->half_width_x + scene.gap(); break;
    case Relation::in_front_of: p.z -= a.half_depth_z + f->half_depth_z + scene.gap(); break;
    case Relation::behind: p.z += a.half_depth_z + f->half_depth_z + scene.gap(); break;
  }
  return p;
}

/// Lexicographically smallest ref-name whose box overlaps `candidate`.
inline std::optional<std::string> check_collision(const Scene& scene, const Aabb& candidate) {
  std::optional<std::string> hit;
  for (const auto& o : scene.objects()) {
    if (overlaps(o.aabb(), candidate) && (!hit || o.ref_name < *hit)) hit = o.ref_name;
  }
  return hit;
}

inline std::string Scene::add_object(const Catalog& catalog, const std::string& prototype,
                                     const Placement& placement) {
  const Footprint* f = catalog.find(prototype);
  if (!f) {
    throw SceneError(Errc::unknown_prototype, prototype, prototype + " is not an available object");
  }
  FloorPoint c = std::visit(
      [&](const auto& p) -> FloorPoint {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GlobalPlacement>) {
          return resolve_global(*this, p.column, p.row);
        } else {
          return resolve_relative(*this, catalog, p.relation, p.anchor, prototype);
        }
      },
      placement);

  const Aabb box = box_at(c, *f);
  if (!within_floor(box)) {
    throw SceneError(Errc::out_of_bounds, prototype,
                     "there is no room for " + prototype + " there: it would leave the floor");
  }
  if (auto blocker = check_collision(*this, box)) {
    throw SceneError(Errc::occupied, *blocker, "the position is already taken by " + *blocker);
  }

  std::string ref = next_ref_name(prototype);
  objects_.push_back({ref, prototype, {c.x, f->height_y / 2, c.z}, *f});
  counters_[prototype] += 1;
  return ref;
}

inline Scene Scene::restore(double width, double depth, double gap,
                            std::vector<SceneObject> objects,
                            std::map<std::string, unsigned> counters) {
  Scene s(width, depth, gap);
  auto invalid = [](const std::string& msg) { return SceneError(Errc::invalid_scene, "", msg); };
  std::set<std::string> refs;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    if (!valid_object_name(o.prototype)) throw invalid("invalid prototype name \"" + o.prototype + "\"");
    if (!refs.insert(o.ref_name).second) throw invalid("duplicate ref-name \"" + o.ref_name + "\"");
    const auto& f = o.footprint;
    for (double v : {f.half_width_x, f.half_depth_z, f.height_y}) {
      if (!std::isfinite(v) || v <= 0) throw invalid("\"" + o.ref_name + "\" has invalid extents");
    }
    if (o.center.y != f.height_y / 2) throw invalid("\"" + o.ref_name + "\" does not rest on the floor");
    if (!s.within_floor(o.aabb())) throw invalid("\"" + o.ref_name + "\" lies outside the floor");
    for (std::size_t j = 0; j < i; ++j) {
      if (overlaps(objects[j].aabb(), o.aabb())) {
        throw invalid("\"" + o.ref_name + "\" overlaps \"" + objects[j].ref_name + "\"");
      }
    }
    // The ref-name must be one the counter already handed out.
    auto it = counters.find(o.prototype);
    const unsigned issued = it == counters.end() ? 0u : it->second;
    bool issued_name = false;
    for (unsigned k = 1; k <= issued && !issued_name; ++k) {
      issued_name = o.ref_name == (k == 1 ? o.prototype : o.prototype + "#" + std::to_string(k));
    }
    if (!issued_name) throw invalid("\"" + o.ref_name + "\" is not consistent with name_counters");
  }
  s.objects_ = std::move(objects);
  s.counters_ = std::move(counters);
  return s;
}

}  // namespace vesna::scene
