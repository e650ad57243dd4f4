#include "semg/frame.hpp"

#include <cmath>
#include <string>

#include "semg/errors.hpp"

namespace semg::ingest {

const char* to_string(FrameError e) noexcept {
  switch (e) {
    case FrameError::BadSync: return "BadSync";
    case FrameError::BadChecksum: return "BadChecksum";
    case FrameError::BadTrailer: return "BadTrailer";
  }
  return "Unknown";
}

FrameBytes encode_frame(std::uint8_t seq, const std::array<std::int32_t, kFrameChannels>& counts) {
  FrameBytes out{};
  out[0] = kSyncByte;
  out[1] = seq;
  for (std::size_t ch = 0; ch < kFrameChannels; ++ch) {
    const std::int32_t c = counts[ch];
    if (c < kCountMin || c > kCountMax) {
      throw DomainError("count " + std::to_string(c) + " on channel " + std::to_string(ch) +
                        " exceeds the 24-bit range");
    }
    const auto u = static_cast<std::uint32_t>(c) & 0xFFFFFFu;
    out[2 + 3 * ch] = static_cast<std::uint8_t>(u >> 16);
    out[3 + 3 * ch] = static_cast<std::uint8_t>(u >> 8);
    out[4 + 3 * ch] = static_cast<std::uint8_t>(u);
  }
  std::uint8_t x = 0;
  for (std::size_t i = 0; i < 14; ++i) x ^= out[i];
  out[14] = x;
  out[15] = kTrailerByte;
  return out;
}

std::variant<SampleFrame, FrameError> decode_frame(std::span<const std::uint8_t, kFrameSize> bytes) {
  if (bytes[0] != kSyncByte) return FrameError::BadSync;
  if (bytes[15] != kTrailerByte) return FrameError::BadTrailer;
  std::uint8_t x = 0;
  for (std::size_t i = 0; i < 14; ++i) x ^= bytes[i];
  if (x != bytes[14]) return FrameError::BadChecksum;

  SampleFrame f;
  f.seq = bytes[1];
  for (std::size_t ch = 0; ch < kFrameChannels; ++ch) {
    std::uint32_t u = (std::uint32_t{bytes[2 + 3 * ch]} << 16) |
                      (std::uint32_t{bytes[3 + 3 * ch]} << 8) | std::uint32_t{bytes[4 + 3 * ch]};
    if (u & 0x800000u) u |= 0xFF000000u;  // sign-extend
    f.counts[ch] = static_cast<std::int32_t>(u);
  }
  return f;
}

void ConversionSpec::validate() const {
  if (!(vref > 0.0)) throw DomainError("vref must be positive");
  if (!(gain > 0.0)) throw DomainError("gain must be positive");
}

double counts_to_volts(std::int32_t counts, const ConversionSpec& spec) {
  return static_cast<double>(counts) * spec.vref / (spec.gain * static_cast<double>(kCountMax));
}

std::int32_t volts_to_counts(double volts, const ConversionSpec& spec) {
  const double c = std::round(volts * spec.gain * static_cast<double>(kCountMax) / spec.vref);
  if (!(c >= kCountMin)) return kCountMin;  // also catches NaN
  if (c > kCountMax) return kCountMax;
  return static_cast<std::int32_t>(c);
}

}  // namespace semg::ingest
