#pragma once

// Wire formats.
//
// Scene commands travel as URL paths on the scene port:
//   add     /{obj}/{posX}/{posY}      e.g. /Yaskawa%20MA2010/right/front
//   remove  /remove/{ref}
//   list    /list
// and are answered with a plain-text body, `done:<payload>` or
// `error:<code>:<message>`.
//
// Fulfillment requests are JSON:
//   {"responseId": "...", "session": "...",
//    "queryResult": {"queryText": "...", "intent": {"displayName": "..."},
//                    "parameters": {"name": "value", ...}}}
// answered with {"fulfillmentText": "..."}.

#include <utility>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vesna/belief.hpp"
#include "vesna/json_util.hpp"
#include "vesna/text.hpp"

namespace vesna::protocol {

/// Malformed wire input. `reason` is a short machine-readable code.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string reason, const std::string& message)
      : std::runtime_error(message), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

enum class Verb { add, remove, list };

struct SceneCommandRequest {
  Verb verb = Verb::list;
  std::string obj_name;  // prototype for add, ref-name for remove
  std::string pos_x;
  std::string pos_y;

  static SceneCommandRequest add(std::string obj, std::string x, std::string y) {
    return {Verb::add, std::move(obj), std::move(x), std::move(y)};
  }
  static SceneCommandRequest remove(std::string ref) { return {Verb::remove, std::move(ref), {}, {}}; }
  static SceneCommandRequest list() { return {Verb::list, {}, {}, {}}; }

  friend bool operator==(const SceneCommandRequest&, const SceneCommandRequest&) = default;
};

inline bool valid_segment(std::string_view s) {
  return !s.empty() && s != "." && s != ".." && s.find('/') == std::string_view::npos;
}

inline std::string encode_scene_request(const SceneCommandRequest& req) {
  switch (req.verb) {
    case Verb::add:
      return "/" + percent_encode(req.obj_name) + "/" + percent_encode(req.pos_x) + "/" +
             percent_encode(req.pos_y);
    case Verb::remove: return "/remove/" + percent_encode(req.obj_name);
    case Verb::list: return "/list";
  }
  return "/list";
}

inline SceneCommandRequest decode_scene_request(std::string_view path) {
  if (path.empty() || path.front() != '/') {
    throw ProtocolError("malformed", "scene command path must start with '/'");
  }
  std::vector<std::string> segments;
  std::size_t start = 1;
  while (true) {
    std::size_t slash = path.find('/', start);
    std::string_view raw = path.substr(start, slash == std::string_view::npos ? path.npos : slash - start);
    auto decoded = percent_decode(raw);
    if (!decoded) throw ProtocolError("malformed", "bad percent-encoding in \"" + std::string(raw) + "\"");
    if (!valid_segment(*decoded)) {
      throw ProtocolError("malformed", "empty or invalid path segment \"" + std::string(raw) + "\"");
    }
    segments.push_back(std::move(*decoded));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }

  if (segments.size() == 1 && segments[0] == "list") return SceneCommandRequest::list();
  if (segments.size() == 2 && segments[0] == "remove") return SceneCommandRequest::remove(segments[1]);
  if (segments.size() == 3) return SceneCommandRequest::add(segments[0], segments[1], segments[2]);
  throw ProtocolError("malformed", "unrecognised scene command path \"" + std::string(path) + "\"");
}

struct SceneCommandResponse {
  enum class Status { done, error };

  Status status = Status::done;
  std::string payload;  // ref-name, or a JSON array of ref-names for list
  std::string code;     // error only
  std::string message;  // error only

  static SceneCommandResponse done(std::string payload) {
    return {Status::done, std::move(payload), {}, {}};
  }
  static SceneCommandResponse error(std::string code, std::string message) {
    return {Status::error, {}, std::move(code), std::move(message)};
  }

  bool ok() const { return status == Status::done; }

  std::string body() const {
    return ok() ? "done:" + payload : "error:" + code + ":" + message;
  }

  int http_status() const {
    if (ok()) return 200;
    if (code == "occupied" || code == "out-of-bounds") return 409;
    if (code == "not-found" || code == "unknown-prototype" || code == "unknown-anchor") return 404;
    if (code == "timeout") return 504;
    if (code == "unavailable") return 503;
    return 400;
  }

  static SceneCommandResponse parse(std::string_view body) {
    if (body.starts_with("done:")) return done(std::string(body.substr(5)));
    if (body.starts_with("error:")) {
      auto rest = body.substr(6);
      auto colon = rest.find(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw ProtocolError("malformed", "error response without code");
      }
      return error(std::string(rest.substr(0, colon)), std::string(rest.substr(colon + 1)));
    }
    throw ProtocolError("malformed", "scene response must start with done: or error:");
  }

  friend bool operator==(const SceneCommandResponse&, const SceneCommandResponse&) = default;
};

inline std::string list_payload(const std::vector<std::string>& refs) {
  json arr = json::array();
  for (const auto& r : refs) arr.push_back(r);
  return arr.dump();
}

inline std::vector<std::string> parse_list_payload(std::string_view payload) {
  try {
    auto arr = json::parse(payload);
    return arr.get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ProtocolError("malformed", std::string("bad list payload: ") + e.what());
  }
}

struct FulfillmentRequest {
  std::string response_id;
  std::string query_text;
  std::string intent_name;
  std::vector<std::pair<std::string, std::string>> parameters;  // document order
  std::string session;

  json to_json() const {
    json params = json::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    return json{{"responseId", response_id},
                {"session", session},
                {"queryResult",
                 {{"queryText", query_text},
                  {"intent", {{"displayName", intent_name}}},
                  {"parameters", params}}}};
  }

  /// Validates against the webhook schema. Throws ProtocolError whose
  /// reason names the offending field.
  static FulfillmentRequest from_json(std::string_view body) {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error&) {
      throw ProtocolError("invalid-json", "request body is not valid JSON");
    }
    auto string_at = [](const json& obj, const char* key, const std::string& path,
                        bool required) -> std::string {
      if (!obj.is_object() || !obj.contains(key)) {
        if (required) throw ProtocolError("missing:" + path, "missing field " + path);
        return {};
      }
      const auto& v = obj.at(key);
      if (!v.is_string()) throw ProtocolError("type:" + path, path + " must be a string");
      return v.get<std::string>();
    };

    if (!doc.is_object()) throw ProtocolError("type:$", "request body must be an object");
    FulfillmentRequest req;
    req.response_id = string_at(doc, "responseId", "responseId", false);
    req.session = string_at(doc, "session", "session", false);
    if (!doc.contains("queryResult") || !doc["queryResult"].is_object()) {
      throw ProtocolError("missing:queryResult", "missing object queryResult");
    }
    const auto& qr = doc["queryResult"];
    req.query_text = string_at(qr, "queryText", "queryResult.queryText", false);
    if (!qr.contains("intent") || !qr["intent"].is_object()) {
      throw ProtocolError("missing:queryResult.intent", "missing object queryResult.intent");
    }
    req.intent_name =
        string_at(qr["intent"], "displayName", "queryResult.intent.displayName", true);
    if (req.intent_name.empty()) {
      throw ProtocolError("empty:queryResult.intent.displayName", "intent name is empty");
    }
    if (qr.contains("parameters")) {
      const auto& params = qr["parameters"];
      if (!params.is_object()) {
        throw ProtocolError("type:queryResult.parameters", "parameters must be an object");
      }
      for (auto it = params.begin(); it != params.end(); ++it) {
        if (!it.value().is_string()) {
          throw ProtocolError("type:queryResult.parameters." + it.key(),
                              "parameter " + it.key() + " must be a string");
        }
        req.parameters.emplace_back(it.key(), it.value().get<std::string>());
      }
    }
    return req;
  }

  RequestBelief to_request_belief() const {
    RequestBelief r;
    r.source = "undefined";
    r.session_id = session;
    r.intent_name = intent_name;
    for (const auto& [k, v] : parameters) r.params.emplace_back(k, v);
    return r;
  }

  friend bool operator==(const FulfillmentRequest&, const FulfillmentRequest&) = default;
};

struct FulfillmentResponse {
  std::string fulfillment_text;

  json to_json() const { return json{{"fulfillmentText", fulfillment_text}}; }
};

}  // namespace vesna::protocol
