#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>

namespace semg::ingest {

// Wire layout, 16 bytes:
//   [0]      sync 0xA0
//   [1]      sequence number, wraps mod 256
//   [2..13]  4 x 24-bit two's-complement counts, most significant byte first
//   [14]     XOR of bytes 0..13
//   [15]     trailer 0xC0
inline constexpr std::size_t kFrameSize = 16;
inline constexpr std::size_t kFrameChannels = 4;
inline constexpr std::uint8_t kSyncByte = 0xA0;
inline constexpr std::uint8_t kTrailerByte = 0xC0;
inline constexpr std::int32_t kCountMax = (1 << 23) - 1;
inline constexpr std::int32_t kCountMin = -(1 << 23);

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

struct SampleFrame {
  std::uint8_t seq = 0;
  std::array<std::int32_t, kFrameChannels> counts{};

  friend bool operator==(const SampleFrame&, const SampleFrame&) = default;
};

enum class FrameError { BadSync, BadChecksum, BadTrailer };

const char* to_string(FrameError e) noexcept;

/// Throws DomainError when a count is outside the 24-bit signed range.
FrameBytes encode_frame(std::uint8_t seq, const std::array<std::int32_t, kFrameChannels>& counts);
inline FrameBytes encode_frame(const SampleFrame& f) { return encode_frame(f.seq, f.counts); }

/// Checks sync, then trailer, then checksum; the first failure is reported.
std::variant<SampleFrame, FrameError> decode_frame(std::span<const std::uint8_t, kFrameSize> bytes);

/// ADC scaling for the amplifier chain.
struct ConversionSpec {
  double vref = 4.5;
  double gain = 24.0;

  void validate() const;
};

/// counts * vref / (gain * (2^23 - 1)).
double counts_to_volts(std::int32_t counts, const ConversionSpec& spec);

/// Inverse of counts_to_volts, rounded to nearest and clamped to the 24-bit range.
std::int32_t volts_to_counts(double volts, const ConversionSpec& spec);

}  // namespace semg::ingest
