#pragma once

// Strict-key helpers shared by the preset and scenario loaders.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "medsec/bench.hpp"

namespace medsec::detail {

using Json = nlohmann::ordered_json;

inline std::string join_key(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, path + ": expected an object");
}

inline void check_keys(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  expect_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw ConfigError(join_key(path, key), "unknown key: " + join_key(path, key));
  }
}

inline const Json& require(const Json& j, const std::string& path, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join_key(path, key), join_key(path, key) + " required");
  return *it;
}

inline double get_number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, key + ": expected a number");
  return j.get<double>();
}

inline std::int64_t get_int(const Json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key, key + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t get_uint(const Json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(key, key + ": expected a nonnegative integer");
}

inline bool get_bool(const Json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError(key, key + ": expected true or false");
  return j.get<bool>();
}

inline std::string get_string(const Json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError(key, key + ": expected a string");
  return j.get<std::string>();
}

// Preset sections; `path` prefixes keys in error messages.
bench::LatencyModel latency_from_json(const Json& j, const std::string& path);
bench::LossModel loss_from_json(const Json& j, const std::string& path);
bench::ResourcePreset resources_from_json(const Json& j, const std::string& path);

}  // namespace medsec::detail
