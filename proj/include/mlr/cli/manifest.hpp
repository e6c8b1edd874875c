#pragma once
// Run provenance. The manifest is the only artifact carrying wall-clock
// data, so determinism comparisons exclude it; the config hash is FNV-1a64
// over the canonical echo, recomputable by any reader.

#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include "mlr/cli/jsonx.hpp"

namespace mlr {

inline constexpr const char* tool_version = "0.1.0";

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string iso8601_utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

struct RunManifest {
  std::string task;
  std::uint64_t seed = 0;
  std::string config_echo;  // canonical dump of the effective config
  std::string started, finished;
  std::vector<std::string> outputs;

  json to_json() const {
    json j;
    j["task"] = task;
    j["seed"] = seed;
    j["config_echo"] = config_echo;
    j["config_hash"] = hex16(fnv1a64(config_echo));
    j["started"] = started;
    j["finished"] = finished;
    j["outputs"] = outputs;
    j["tool_version"] = tool_version;
    return j;
  }
};

}  // namespace mlr
