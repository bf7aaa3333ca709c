#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vesna/error.hpp"

namespace vesna {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline json parse_document(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": malformed document: " + e.what());
  }
}

// Rejects any key outside `allowed`; loads are strict.
inline void expect_object(const json& j, const std::string& where,
                          std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto key : allowed) known = known || key == it.key();
    if (!known) throw ConfigError(where + ": unknown field \"" + it.key() + "\"");
  }
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing field \"" + key + "\"");
  return *it;
}

inline std::string require_string(const json& j, const std::string& key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline double require_number(const json& j, const std::string& key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline const json& require_array(const json& j, const std::string& key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array");
  return v;
}

inline void check_schema_version(const json& j, const std::string& where) {
  const auto& v = require(j, "schema_version", where);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ConfigError(where + ": unsupported schema_version " + v.dump() + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
}

}  // namespace detail
}  // namespace vesna
