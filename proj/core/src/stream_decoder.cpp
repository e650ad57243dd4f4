#include "semg/stream_decoder.hpp"

#include <algorithm>

namespace semg::ingest {

void StreamDecoder::hunt_lost() {
  if (locked_) {
    locked_ = false;
    ++stats_.resyncs;
  }
}

void StreamDecoder::feed(std::span<const std::uint8_t> chunk, std::vector<SampleFrame>& out) {
  buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
  FrameBytes candidate{};
  while (!buffer_.empty()) {
    if (buffer_.front() != kSyncByte) {
      buffer_.pop_front();
      hunt_lost();
      continue;
    }
    if (buffer_.size() < kFrameSize) break;
    std::copy_n(buffer_.begin(), kFrameSize, candidate.begin());
    auto decoded = decode_frame(candidate);
    if (auto* frame = std::get_if<SampleFrame>(&decoded)) {
      if (last_seq_) {
        const auto expected = static_cast<std::uint8_t>(*last_seq_ + 1);
        stats_.frames_dropped += static_cast<std::uint8_t>(frame->seq - expected);
      }
      last_seq_ = frame->seq;
      ++stats_.frames_ok;
      locked_ = true;
      out.push_back(*frame);
      buffer_.erase(buffer_.begin(), buffer_.begin() + kFrameSize);
    } else {
      ++stats_.frames_corrupt;
      hunt_lost();
      buffer_.pop_front();
    }
  }
}

std::vector<SampleFrame> StreamDecoder::feed(std::span<const std::uint8_t> chunk) {
  std::vector<SampleFrame> out;
  feed(chunk, out);
  return out;
}

void StreamDecoder::finish() {
  if (buffer_.empty()) return;
  if (buffer_.front() == kSyncByte) ++stats_.frames_corrupt;
  hunt_lost();
  buffer_.clear();
}

DecodedStream stream_decode(std::span<const std::uint8_t> bytes) {
  StreamDecoder decoder;
  DecodedStream result;
  decoder.feed(bytes, result.frames);
  decoder.finish();
  result.stats = decoder.stats();
  return result;
}

}  // namespace semg::ingest
