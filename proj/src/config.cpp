#include "alterego/config.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace alterego {
namespace io {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::size_t start = 0;
  int line_number = 0;
  while (start <= text.size()) {
    const auto newline = text.find('\n', start);
    std::string line = text.substr(
        start, newline == std::string::npos ? std::string::npos : newline - start);
    ++line_number;
    start = newline == std::string::npos ? text.size() + 1 : newline + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(line_number) +
                         ": expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(line_number) + ": empty key");
    cfg.set(key, value);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  try {
    return parse(read_file(path));
  } catch (const data_error& e) {
    throw config_error(e.what());
  }
}

std::string Config::emit() const {
  std::string out;
  for (const auto& [key, value] : items_) out += key + " = " + value + "\n";
  return out;
}

bool Config::has(const std::string& key) const { return find(key).has_value(); }

void Config::set(const std::string& key, const std::string& value) {
  for (auto& item : items_) {
    if (item.first == key) {
      item.second = value;
      return;
    }
  }
  items_.emplace_back(key, value);
}

std::optional<std::string> Config::find(const std::string& key) const {
  for (const auto& item : items_)
    if (item.first == key) return item.second;
  return std::nullopt;
}

std::string Config::get_string(const std::string& key) const {
  const auto value = find(key);
  if (!value) throw config_error("missing required config key '" + key + "'");
  return *value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  try {
    std::size_t used = 0;
    const double parsed = std::stod(*value, &used);
    if (used != value->size()) throw std::invalid_argument(*value);
    return parsed;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse number '" + *value + "'");
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  try {
    std::size_t used = 0;
    const int parsed = std::stoi(*value, &used);
    if (used != value->size()) throw std::invalid_argument(*value);
    return parsed;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse integer '" + *value + "'");
  }
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(*value, &used);
    if (used != value->size()) throw std::invalid_argument(*value);
    return parsed;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse integer '" + *value + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto value = find(key);
  if (!value) return fallback;
  std::string lower = *value;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes") return true;
  if (lower == "false" || lower == "0" || lower == "no") return false;
  throw config_error("config key '" + key + "': cannot parse boolean '" + *value + "'");
}

}  // namespace io
}  // namespace alterego
