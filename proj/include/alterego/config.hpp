#pragma once

#include "alterego/csv.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alterego {
namespace io {

/// Flat `key = value` configuration with section-prefixed keys
/// (e.g. `trex.learning_rate`). Lines starting with '#' are comments.
/// Insertion order is preserved so parse -> emit -> parse is the identity.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  std::string emit() const;

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

  bool operator==(const Config& other) const { return items_ == other.items_; }

 private:
  std::optional<std::string> find(const std::string& key) const;

  std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace io
}  // namespace alterego
