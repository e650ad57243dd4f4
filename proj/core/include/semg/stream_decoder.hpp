#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "semg/frame.hpp"

namespace semg::ingest {

struct StreamStats {
  std::uint64_t frames_ok = 0;
  std::uint64_t frames_corrupt = 0;  // sync byte seen but frame failed validation
  std::uint64_t frames_dropped = 0;  // inferred from sequence gaps
  std::uint64_t resyncs = 0;         // times the decoder lost frame alignment

  friend bool operator==(const StreamStats&, const StreamStats&) = default;
};

/// Incremental frame scanner. Feed chunks of any size; decoded frames are
/// returned in arrival order. Single owner, not thread-safe.
class StreamDecoder {
 public:
  /// Appends decoded frames to `out`.
  void feed(std::span<const std::uint8_t> chunk, std::vector<SampleFrame>& out);
  std::vector<SampleFrame> feed(std::span<const std::uint8_t> chunk);

  /// Accounts trailing bytes that never formed a frame.
  void finish();

  const StreamStats& stats() const { return stats_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  void hunt_lost();

  std::deque<std::uint8_t> buffer_;
  StreamStats stats_;
  std::optional<std::uint8_t> last_seq_;
  bool locked_ = true;
};

struct DecodedStream {
  std::vector<SampleFrame> frames;
  StreamStats stats;
};

DecodedStream stream_decode(std::span<const std::uint8_t> bytes);

}  // namespace semg::ingest
