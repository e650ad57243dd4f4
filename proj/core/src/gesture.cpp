#include "semg/gesture.hpp"

#include <algorithm>
#include <cctype>

#include "semg/errors.hpp"

namespace semg {

std::string_view name_of(GestureLabel g) noexcept {
  switch (g) {
    case GestureLabel::Neutral: return "neutral";
    case GestureLabel::Thumb: return "thumb";
    case GestureLabel::Index: return "index";
    case GestureLabel::Middle: return "middle";
    case GestureLabel::Ring: return "ring";
    case GestureLabel::HandClosure: return "hand_closure";
  }
  return "unknown";
}

std::string_view table_caption(GestureLabel g) noexcept {
  switch (g) {
    case GestureLabel::Neutral: return "Neutral";
    case GestureLabel::Thumb: return "Thumb";
    case GestureLabel::Index: return "Index";
    case GestureLabel::Middle: return "Middle";
    case GestureLabel::Ring: return "Ring";
    case GestureLabel::HandClosure: return "Hand";
  }
  return "?";
}

std::optional<GestureLabel> gesture_from_code(std::uint8_t code) noexcept {
  if (code >= kGestureCount) return std::nullopt;
  return static_cast<GestureLabel>(code);
}

std::optional<GestureLabel> parse_gesture(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lower.begin(), lower.end(), '-', '_');
  if (lower == "hand" || lower == "handclosure") return GestureLabel::HandClosure;
  for (std::uint8_t code = 0; code < kGestureCount; ++code) {
    auto g = static_cast<GestureLabel>(code);
    if (lower == name_of(g)) return g;
  }
  return std::nullopt;
}

std::vector<GestureLabel> parse_gesture_list(std::string_view text) {
  std::vector<GestureLabel> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                  : comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.remove_suffix(1);
    if (!item.empty()) {
      auto g = parse_gesture(item);
      if (!g) throw DomainError("unknown gesture '" + std::string(item) + "'");
      out.push_back(*g);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_gestures(const std::vector<GestureLabel>& gestures) {
  std::string out;
  for (auto g : gestures) {
    if (!out.empty()) out += ',';
    out += name_of(g);
  }
  return out;
}

}  // namespace semg
