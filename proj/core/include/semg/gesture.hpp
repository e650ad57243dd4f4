#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semg {

/// Hand posture classes. Neutral is the rest class; the other five are the
/// gestures that get classified and reported.
enum class GestureLabel : std::uint8_t {
  Neutral = 0,
  Thumb = 1,
  Index = 2,
  Middle = 3,
  Ring = 4,
  HandClosure = 5,
};

inline constexpr std::size_t kGestureCount = 6;

inline constexpr std::array<GestureLabel, 5> kActiveGestures = {
    GestureLabel::Thumb, GestureLabel::Index, GestureLabel::Middle,
    GestureLabel::Ring, GestureLabel::HandClosure};

constexpr std::size_t index_of(GestureLabel g) noexcept {
  return static_cast<std::size_t>(g);
}

/// Lower-case identifier ("thumb", "hand_closure", ...).
std::string_view name_of(GestureLabel g) noexcept;

/// Row caption used in accuracy tables ("Thumb", ..., "Hand").
std::string_view table_caption(GestureLabel g) noexcept;

/// Accepts the identifier, the caption, or "hand" for HandClosure (case-insensitive).
std::optional<GestureLabel> parse_gesture(std::string_view text);

std::optional<GestureLabel> gesture_from_code(std::uint8_t code) noexcept;

/// Parses a comma separated gesture list; throws DomainError naming the bad entry.
std::vector<GestureLabel> parse_gesture_list(std::string_view text);

std::string join_gestures(const std::vector<GestureLabel>& gestures);

}  // namespace semg
