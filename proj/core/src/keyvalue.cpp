#include "semg/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "semg/errors.hpp"

namespace semg {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    auto line = trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                   : eol - pos));
    ++line_no;
    if (!line.empty() && line.front() != '#') {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      auto key = trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      cfg.set(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KeyValueConfig::set_from_assignment(std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override '" + std::string(assignment) + "' has an empty key");
  set(std::string(key), std::string(trim(assignment.substr(eq + 1))));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  used_.erase(key);
}

std::optional<std::string> KeyValueConfig::take_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

void KeyValueConfig::take(const std::string& key, double& target) const {
  auto v = take_string(key);
  if (!v) return;
  try {
    std::size_t used = 0;
    double parsed = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing characters");
    target = parsed;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + *v + "' is not a number");
  }
}

void KeyValueConfig::take(const std::string& key, int& target) const {
  auto v = take_string(key);
  if (!v) return;
  int parsed = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError("key '" + key + "': '" + *v + "' is not an integer");
  }
  target = parsed;
}

void KeyValueConfig::take(const std::string& key, std::uint64_t& target) const {
  auto v = take_string(key);
  if (!v) return;
  std::uint64_t parsed = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError("key '" + key + "': '" + *v + "' is not an unsigned integer");
  }
  target = parsed;
}

void KeyValueConfig::take(const std::string& key, std::string& target) const {
  if (auto v = take_string(key)) target = *v;
}

void KeyValueConfig::reject_unused(std::string_view context) const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) {
      throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace semg
