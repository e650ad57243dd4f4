#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "semg/gesture.hpp"

namespace semg {

/// Seed used whenever the caller does not pick one.
inline constexpr std::uint64_t kDefaultSeed = 1299;

/// Acquisition protocol: every gesture is repeated `reps_per_gesture` times as
/// a hold window followed by a rest window, gesture blocks in list order.
struct ProtocolSpec {
  double sample_rate = 250.0;  // Hz
  int channels = 4;
  double hold = 5.0;  // s
  double rest = 5.0;  // s
  int reps_per_gesture = 20;
  std::vector<GestureLabel> gestures{kActiveGestures.begin(), kActiveGestures.end()};

  /// Throws DomainError on any violated invariant.
  void validate() const;

  std::size_t hold_samples() const;
  std::size_t rest_samples() const;
  std::size_t cycle_samples() const { return hold_samples() + rest_samples(); }
  std::size_t block_samples() const {
    return cycle_samples() * static_cast<std::size_t>(reps_per_gesture);
  }
  std::size_t total_samples() const { return block_samples() * gestures.size(); }
};

}  // namespace semg
