#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semg/frame.hpp"
#include "semg/gesture.hpp"
#include "semg/protocol.hpp"
#include "semg/stream_decoder.hpp"

namespace semg::ingest {

inline constexpr int kRecordingFormatVersion = 1;

struct RecordingHeader {
  int format_version = kRecordingFormatVersion;
  ProtocolSpec protocol;
  ConversionSpec conversion;
  std::string subject_id;
  std::string placement;
  std::uint64_t seed = 0;
};

/// A labeled multi-channel session in volts.
struct Recording {
  RecordingHeader header;
  std::vector<std::vector<float>> channels;
  std::vector<GestureLabel> labels;
  StreamStats stats;

  std::size_t samples() const { return labels.size(); }
  double sample_rate() const { return header.protocol.sample_rate; }
  /// Equal channel lengths, label track of the same length, channel count
  /// matching the header. Throws DomainError.
  void validate() const;
};

// File layout: "SEMGREC1", u32 LE header length, UTF-8 `key = value` header,
// channel-major float32 LE samples, one label byte per sample.
void write_recording(const Recording& rec, const std::filesystem::path& path);
Recording read_recording(const std::filesystem::path& path);

/// In-memory variants of the same format.
std::vector<std::uint8_t> serialize_recording(const Recording& rec);
Recording parse_recording(std::span<const std::uint8_t> bytes);

/// Frames to volts. Frames lost to sequence gaps are filled by holding the
/// previous sample so that the series keeps its nominal timing.
Recording recording_from_frames(const std::vector<SampleFrame>& frames, const StreamStats& stats,
                                const ConversionSpec& conversion, double sample_rate);

/// Volts to frames (first four channels, seq starting at 0).
std::vector<std::uint8_t> frames_from_recording(const Recording& rec);

}  // namespace semg::ingest
