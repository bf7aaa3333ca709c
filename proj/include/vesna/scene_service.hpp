#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vesna/agent.hpp"
#include "vesna/json_util.hpp"
#include "vesna/messages.hpp"
#include "vesna/scene.hpp"

namespace vesna {

struct SceneSnapshot {
  scene::Scene scene;
  std::uint64_t version = 0;
};

/// Owns the scene. Mutations are serialized; `version` increases by one
/// for every successful add or remove and never otherwise.
class SceneService {
 public:
  SceneService(scene::Catalog catalog, scene::Scene initial = scene::Scene{})
      : catalog_(std::move(catalog)), scene_(std::move(initial)) {}

  const scene::Catalog& catalog() const { return catalog_; }

  protocol::SceneCommandResponse execute(const protocol::SceneCommandRequest& req) {
    using protocol::SceneCommandResponse;
    using protocol::Verb;
    std::lock_guard lock(mutex_);
    try {
      switch (req.verb) {
        case Verb::add: {
          if (req.obj_name.empty() || req.pos_x.empty() || req.pos_y.empty()) {
            return SceneCommandResponse::error("malformed", "add needs an object and a position");
          }
          auto placement = scene::parse_placement(req.pos_x, req.pos_y);
          auto ref = scene_.add_object(catalog_, req.obj_name, placement);
          ++version_;
          return SceneCommandResponse::done(ref);
        }
        case Verb::remove: {
          auto removed = scene_.remove_object(req.obj_name);
          ++version_;
          return SceneCommandResponse::done(removed.ref_name);
        }
        case Verb::list: {
          std::vector<std::string> refs;
          for (const auto& o : scene_.objects()) refs.push_back(o.ref_name);
          return SceneCommandResponse::done(protocol::list_payload(refs));
        }
      }
    } catch (const scene::SceneError& e) {
      return SceneCommandResponse::error(std::string(scene::to_string(e.code())), e.what());
    }
    return SceneCommandResponse::error("malformed", "unknown verb");
  }

  /// Decodes a request path and executes it; malformed paths never touch
  /// the scene.
  protocol::SceneCommandResponse handle_path(std::string_view path) {
    try {
      return execute(protocol::decode_scene_request(path));
    } catch (const protocol::ProtocolError& e) {
      return protocol::SceneCommandResponse::error(e.reason(), e.what());
    }
  }

  SceneSnapshot snapshot() const {
    std::lock_guard lock(mutex_);
    return {scene_, version_};
  }

  std::uint64_t version() const {
    std::lock_guard lock(mutex_);
    return version_;
  }

 private:
  scene::Catalog catalog_;
  scene::Scene scene_;
  std::uint64_t version_ = 0;
  mutable std::mutex mutex_;
};

/// Scene client that calls the service directly, without HTTP.
class LocalSceneClient : public agent::SceneClient {
 public:
  explicit LocalSceneClient(SceneService& service) : service_(service) {}

  protocol::SceneCommandResponse execute(const protocol::SceneCommandRequest& req) override {
    // Same path the HTTP listener takes, so both routes see identical bytes.
    return service_.handle_path(protocol::encode_scene_request(req));
  }

 private:
  SceneService& service_;
};

/// The document served at GET /scene.
inline json scene_state_json(const SceneSnapshot& snap) {
  json objects = json::array();
  for (const auto& o : snap.scene.objects()) {
    objects.push_back({{"ref_name", o.ref_name},
                       {"prototype", o.prototype},
                       {"center", {{"x", o.center.x}, {"y", o.center.y}, {"z", o.center.z}}},
                       {"extents",
                        {{"half_width_x", o.footprint.half_width_x},
                         {"half_depth_z", o.footprint.half_depth_z},
                         {"height_y", o.footprint.height_y}}}});
  }
  return json{{"scene_version", snap.version},
              {"floor",
               {{"width_x", snap.scene.floor_width_x()}, {"depth_z", snap.scene.floor_depth_z()}}},
              {"objects", objects}};
}

}  // namespace vesna
