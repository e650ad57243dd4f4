#pragma once

#include <filesystem>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace semg {

/// Plain-text `key = value` configuration. Blank lines and lines starting with
/// '#' are ignored. Every lookup marks the key as used so that callers can
/// reject whatever is left over.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Adds or replaces an entry from a "key=value" string.
  void set_from_assignment(std::string_view assignment);
  void set(const std::string& key, const std::string& value);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  bool empty() const { return values_.empty(); }

  std::optional<std::string> take_string(const std::string& key) const;
  /// Reads a double into `target` when present; throws ConfigError on a bad number.
  void take(const std::string& key, double& target) const;
  void take(const std::string& key, int& target) const;
  void take(const std::string& key, std::uint64_t& target) const;
  void take(const std::string& key, std::string& target) const;

  /// Throws ConfigError naming the first key that nobody consumed.
  void reject_unused(std::string_view context) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace semg
