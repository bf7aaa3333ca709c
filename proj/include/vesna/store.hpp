#pragma once

// Workspace documents. A workspace directory holds
//   nlu.json      intents, entities, threshold
//   plans.json    agent plan library
//   catalog.json  placeable prototypes and their footprints
//   scene.json    floor size, clearance gap and placed objects (optional)
// All share `schema_version` and reject unknown fields.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vesna/agent.hpp"
#include "vesna/error.hpp"
#include "vesna/json_util.hpp"
#include "vesna/nlu.hpp"
#include "vesna/scene.hpp"

namespace vesna::store {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline scene::Catalog load_catalog(std::string_view document) {
  using namespace vesna::detail;
  const json doc = parse_document(document, "catalog");
  expect_object(doc, "catalog", {"schema_version", "prototypes"});
  check_schema_version(doc, "catalog");
  scene::Catalog catalog;
  for (const auto& p : require_array(doc, "prototypes", "catalog")) {
    expect_object(p, "catalog.prototypes[]", {"name", "half_width_x", "half_depth_z", "height_y"});
    const std::string name = require_string(p, "name", "catalog.prototypes[]");
    const std::string where = "catalog: prototype \"" + name + "\"";
    scene::Footprint f{require_number(p, "half_width_x", where), require_number(p, "half_depth_z", where),
                       require_number(p, "height_y", where)};
    try {
      catalog.add(name, f);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (catalog.empty()) throw ConfigError("catalog: schema violation: no prototypes");
  return catalog;
}

inline json catalog_to_json(const scene::Catalog& catalog) {
  json protos = json::array();
  for (const auto& [name, f] : catalog.prototypes()) {
    protos.push_back({{"name", name},
                      {"half_width_x", f.half_width_x},
                      {"half_depth_z", f.half_depth_z},
                      {"height_y", f.height_y}});
  }
  return json{{"schema_version", kSchemaVersion}, {"prototypes", protos}};
}

/// Deterministic document: objects in insertion order, counters by name.
inline std::string scene_to_string(const scene::Scene& s) {
  json objects = json::array();
  for (const auto& o : s.objects()) {
    objects.push_back({{"ref_name", o.ref_name},
                       {"prototype", o.prototype},
                       {"center", {o.center.x, o.center.y, o.center.z}},
                       {"extents",
                        {{"half_width_x", o.footprint.half_width_x},
                         {"half_depth_z", o.footprint.half_depth_z},
                         {"height_y", o.footprint.height_y}}}});
  }
  json counters = json::object();
  for (const auto& [k, v] : s.name_counters()) counters[k] = v;
  json doc{{"schema_version", kSchemaVersion},
           {"floor", {{"width_x", s.floor_width_x()}, {"depth_z", s.floor_depth_z()}}},
           {"gap", s.gap()},
           {"name_counters", counters},
           {"objects", objects}};
  return doc.dump(2) + "\n";
}

inline scene::Scene scene_from_string(std::string_view document) {
  using namespace vesna::detail;
  const json doc = parse_document(document, "scene");
  expect_object(doc, "scene", {"schema_version", "floor", "gap", "name_counters", "objects"});
  check_schema_version(doc, "scene");

  const auto& floor = require(doc, "floor", "scene");
  expect_object(floor, "scene.floor", {"width_x", "depth_z"});
  const double width = require_number(floor, "width_x", "scene.floor");
  const double depth = require_number(floor, "depth_z", "scene.floor");
  const double gap = doc.contains("gap") ? require_number(doc, "gap", "scene") : scene::kDefaultGap;

  std::map<std::string, unsigned> counters;
  if (doc.contains("name_counters")) {
    const auto& c = doc["name_counters"];
    if (!c.is_object()) throw ConfigError("scene.name_counters: expected an object");
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (!it.value().is_number_unsigned()) {
        throw ConfigError("scene.name_counters." + it.key() + ": expected a non-negative integer");
      }
      counters[it.key()] = it.value().get<unsigned>();
    }
  }

  std::vector<scene::SceneObject> objects;
  if (doc.contains("objects")) {
    for (const auto& o : require_array(doc, "objects", "scene")) {
      expect_object(o, "scene.objects[]", {"ref_name", "prototype", "center", "extents"});
      scene::SceneObject obj;
      obj.ref_name = require_string(o, "ref_name", "scene.objects[]");
      const std::string where = "scene: object \"" + obj.ref_name + "\"";
      obj.prototype = require_string(o, "prototype", where);
      const auto& c = require(o, "center", where);
      if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() || !c[2].is_number()) {
        throw ConfigError(where + ".center: expected [x, y, z]");
      }
      obj.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
      const auto& e = require(o, "extents", where);
      expect_object(e, where + ".extents", {"half_width_x", "half_depth_z", "height_y"});
      obj.footprint = {require_number(e, "half_width_x", where), require_number(e, "half_depth_z", where),
                       require_number(e, "height_y", where)};
      objects.push_back(std::move(obj));
    }
  }

  try {
    return scene::Scene::restore(width, depth, gap, std::move(objects), std::move(counters));
  } catch (const scene::SceneError& e) {
    throw ConfigError(std::string("scene: invariant violation: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline void save_scene(const scene::Scene& s, const fs::path& path) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(tmp.string() + ": cannot write file");
    out << scene_to_string(s);
    if (!out) throw ConfigError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

inline scene::Scene load_scene(const fs::path& path) {
  try {
    return scene_from_string(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

struct WorkspaceConfig {
  fs::path dir;
  fs::path nlu_path;
  fs::path plans_path;
  fs::path catalog_path;
  fs::path scene_path;
  double floor_width_x = scene::kDefaultFloor;
  double floor_depth_z = scene::kDefaultFloor;
  double gap = scene::kDefaultGap;
  double threshold = 0.6;
};

struct Workspace {
  WorkspaceConfig config;
  nlu::NluConfig nlu;
  std::vector<agent::Plan> plans;
  scene::Catalog catalog;
  scene::Scene scene;
};

namespace detail {

template <typename F>
auto load_from(const fs::path& path, F&& parse) {
  try {
    return parse(read_file(path));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw ConfigError(path.string() + ": " + msg);
  }
}

// The intent literal in a plan trigger shaped like request(_, _, "Intent", _, _).
inline std::optional<std::string> trigger_intent(const agent::Plan& plan) {
  const auto& t = plan.trigger;
  if (t.functor != "request" || t.args.size() != 5) return std::nullopt;
  if (t.args[2].kind != Term::Kind::string) return std::nullopt;
  return t.args[2].text;
}

}  // namespace detail

/// Loads and cross-validates a workspace. The first failure is thrown as a
/// ConfigError prefixed with the file it came from.
inline Workspace load_workspace(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError(dir.string() + ": not a directory");
  Workspace ws;
  ws.config.dir = dir;
  ws.config.nlu_path = dir / "nlu.json";
  ws.config.plans_path = dir / "plans.json";
  ws.config.catalog_path = dir / "catalog.json";
  ws.config.scene_path = dir / "scene.json";

  ws.nlu = detail::load_from(ws.config.nlu_path, [](const std::string& s) { return nlu::load_nlu_config(s); });
  ws.plans = detail::load_from(ws.config.plans_path, [](const std::string& s) { return agent::load_plans(s); });
  ws.catalog = detail::load_from(ws.config.catalog_path, [](const std::string& s) { return load_catalog(s); });
  if (fs::exists(ws.config.scene_path)) {
    ws.scene = detail::load_from(ws.config.scene_path, [](const std::string& s) { return scene_from_string(s); });
  }

  for (const auto& plan : ws.plans) {
    auto intent = detail::trigger_intent(plan);
    if (!intent) continue;
    const auto* def = ws.nlu.find_intent(*intent);
    if (!def || !def->fulfillment) {
      throw ConfigError(ws.config.plans_path.string() + ": plan \"" + plan.label +
                        "\" handles intent \"" + *intent + "\" which has no fulfillment in nlu.json");
    }
  }
  for (const auto& o : ws.scene.objects()) {
    if (!ws.catalog.find(o.prototype)) {
      throw ConfigError(ws.config.scene_path.string() + ": object \"" + o.ref_name +
                        "\" uses prototype \"" + o.prototype + "\" missing from catalog.json");
    }
  }

  ws.config.floor_width_x = ws.scene.floor_width_x();
  ws.config.floor_depth_z = ws.scene.floor_depth_z();
  ws.config.gap = ws.scene.gap();
  ws.config.threshold = ws.nlu.confidence_threshold;
  return ws;
}

}  // namespace vesna::store
