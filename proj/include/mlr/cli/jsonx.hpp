#pragma once
// Config document access with JSON-pointer paths in every error. A Cursor
// wraps a node plus the pointer that reached it; typed getters throw
// ConfigError naming the pointer and the expectation, which the front end
// maps to exit code 2.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "mlr/base.hpp"

namespace mlr {

using json = nlohmann::json;

struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};

class Cursor {
 public:
  Cursor(const json& node, std::string path) : node_(&node), path_(std::move(path)) {}
  explicit Cursor(const json& root) : Cursor(root, "") {}

  const json& raw() const { return *node_; }
  const std::string& path() const { return path_.empty() ? root_name_ : path_; }

  bool has(const std::string& key) const { return node_->is_object() && node_->contains(key); }

  Cursor at(const std::string& key) const {
    if (!node_->is_object()) fail("expected an object");
    if (!node_->contains(key))
      throw ConfigError("config error at " + path_ + "/" + key + ": missing required value");
    return Cursor((*node_)[key], path_ + "/" + key);
  }

  Cursor at(std::size_t i) const {
    if (!node_->is_array()) fail("expected an array");
    if (i >= node_->size()) fail("index " + std::to_string(i) + " out of range");
    return Cursor((*node_)[i], path_ + "/" + std::to_string(i));
  }

  std::size_t size() const {
    if (!node_->is_array()) fail("expected an array");
    return node_->size();
  }

  std::string as_string() const {
    if (!node_->is_string()) fail("expected a string");
    return node_->get<std::string>();
  }

  double as_number() const {
    if (!node_->is_number()) fail("expected a number");
    return node_->get<double>();
  }

  int as_int() const {
    if (!node_->is_number_integer()) fail("expected an integer");
    return node_->get<int>();
  }

  std::uint64_t as_uint64() const {
    if (!node_->is_number_unsigned() && !(node_->is_number_integer() && node_->get<long long>() >= 0))
      fail("expected a non-negative integer");
    return node_->get<std::uint64_t>();
  }

  bool as_bool() const {
    if (!node_->is_boolean()) fail("expected a boolean");
    return node_->get<bool>();
  }

  std::vector<double> as_numbers() const {
    if (!node_->is_array()) fail("expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < node_->size(); ++i) v.push_back(at(i).as_number());
    return v;
  }

  std::vector<int> as_ints() const {
    if (!node_->is_array()) fail("expected an array of integers");
    std::vector<int> v;
    for (std::size_t i = 0; i < node_->size(); ++i) v.push_back(at(i).as_int());
    return v;
  }

  // Typed optional reads with defaults.
  std::string get_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? at(key).as_string() : dflt;
  }
  double get_or(const std::string& key, double dflt) const {
    return has(key) ? at(key).as_number() : dflt;
  }
  int get_or(const std::string& key, int dflt) const {
    return has(key) ? at(key).as_int() : dflt;
  }
  bool get_or(const std::string& key, bool dflt) const {
    return has(key) ? at(key).as_bool() : dflt;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config error at " + path() + ": " + what);
  }

 private:
  const json* node_;
  std::string path_;
  inline static const std::string root_name_ = "/";
};

inline Vec to_vec(const Cursor& c) {
  const auto v = c.as_numbers();
  Vec x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

inline json vec_to_json(const Vec& x) {
  json a = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

}  // namespace mlr
