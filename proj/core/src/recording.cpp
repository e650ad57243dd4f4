#include "semg/recording.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "semg/errors.hpp"
#include "semg/keyvalue.hpp"

namespace semg::ingest {
namespace {

constexpr char kMagic[] = "SEMGREC1";
constexpr std::size_t kMagicSize = 8;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

void put_f32_le(std::vector<std::uint8_t>& out, float v) {
  put_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

std::string render_header(const Recording& rec) {
  const auto& h = rec.header;
  const auto& p = h.protocol;
  std::ostringstream os;
  os << "format_version = " << h.format_version << '\n'
     << "subject = " << h.subject_id << '\n'
     << "placement = " << h.placement << '\n'
     << "seed = " << h.seed << '\n'
     << "sample_rate = " << fmt_double(p.sample_rate) << '\n'
     << "channels = " << rec.channels.size() << '\n'
     << "samples = " << rec.samples() << '\n'
     << "hold = " << fmt_double(p.hold) << '\n'
     << "rest = " << fmt_double(p.rest) << '\n'
     << "reps_per_gesture = " << p.reps_per_gesture << '\n'
     << "gestures = " << join_gestures(p.gestures) << '\n'
     << "vref = " << fmt_double(h.conversion.vref) << '\n'
     << "gain = " << fmt_double(h.conversion.gain) << '\n'
     << "frames_ok = " << rec.stats.frames_ok << '\n'
     << "frames_corrupt = " << rec.stats.frames_corrupt << '\n'
     << "frames_dropped = " << rec.stats.frames_dropped << '\n'
     << "resyncs = " << rec.stats.resyncs << '\n';
  return os.str();
}

}  // namespace

void Recording::validate() const {
  if (static_cast<std::size_t>(header.protocol.channels) != channels.size()) {
    throw DomainError("header declares " + std::to_string(header.protocol.channels) +
                      " channels but recording holds " + std::to_string(channels.size()));
  }
  for (std::size_t ch = 0; ch < channels.size(); ++ch) {
    if (channels[ch].size() != labels.size()) {
      throw DomainError("channel " + std::to_string(ch) + " length differs from label track");
    }
  }
  if (!(header.protocol.sample_rate > 0.0)) throw DomainError("sample rate must be positive");
}

std::vector<std::uint8_t> serialize_recording(const Recording& rec) {
  rec.validate();
  const std::string header = render_header(rec);
  std::vector<std::uint8_t> out(kMagic, kMagic + kMagicSize);
  out.reserve(kMagicSize + 4 + header.size() + rec.channels.size() * rec.samples() * 4 +
              rec.samples());
  put_u32_le(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  for (const auto& ch : rec.channels) {
    for (float v : ch) put_f32_le(out, v);
  }
  for (auto g : rec.labels) out.push_back(static_cast<std::uint8_t>(g));
  return out;
}

Recording parse_recording(std::span<const std::uint8_t> bytes) {
  using Kind = FormatError::Kind;
  if (bytes.size() < kMagicSize) throw FormatError(Kind::TruncatedFile, "missing magic");
  if (std::memcmp(bytes.data(), kMagic, kMagicSize - 1) != 0) {
    throw FormatError(Kind::BadMagic, "not a recording file");
  }
  if (bytes[kMagicSize - 1] != static_cast<std::uint8_t>(kMagic[kMagicSize - 1])) {
    throw FormatError(Kind::UnsupportedVersion,
                      std::string("container tag '") + static_cast<char>(bytes[kMagicSize - 1]) +
                          "'");
  }
  if (bytes.size() < kMagicSize + 4) throw FormatError(Kind::TruncatedFile, "missing header length");
  const std::uint32_t header_len = get_u32_le(bytes.data() + kMagicSize);
  const std::size_t payload_at = kMagicSize + 4 + std::size_t{header_len};
  if (bytes.size() < payload_at) throw FormatError(Kind::TruncatedFile, "header cut short");

  const std::string_view header_text(reinterpret_cast<const char*>(bytes.data() + kMagicSize + 4),
                                     header_len);
  Recording rec;
  std::uint64_t samples = 0;
  int channels = 0;
  try {
    const auto kv = KeyValueConfig::parse(header_text);
    auto& h = rec.header;
    auto& p = h.protocol;
    kv.take("format_version", h.format_version);
    if (h.format_version != kRecordingFormatVersion) {
      throw FormatError(Kind::UnsupportedVersion,
                        "format_version " + std::to_string(h.format_version));
    }
    kv.take("subject", h.subject_id);
    kv.take("placement", h.placement);
    kv.take("seed", h.seed);
    kv.take("sample_rate", p.sample_rate);
    kv.take("channels", channels);
    kv.take("samples", samples);
    kv.take("hold", p.hold);
    kv.take("rest", p.rest);
    kv.take("reps_per_gesture", p.reps_per_gesture);
    if (auto g = kv.take_string("gestures")) p.gestures = parse_gesture_list(*g);
    kv.take("vref", h.conversion.vref);
    kv.take("gain", h.conversion.gain);
    kv.take("frames_ok", rec.stats.frames_ok);
    kv.take("frames_corrupt", rec.stats.frames_corrupt);
    kv.take("frames_dropped", rec.stats.frames_dropped);
    kv.take("resyncs", rec.stats.resyncs);
    for (const char* required : {"sample_rate", "channels", "samples"}) {
      if (!kv.contains(required)) {
        throw FormatError(Kind::MalformedHeader, std::string("missing key '") + required + "'");
      }
    }
    p.channels = channels;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(Kind::MalformedHeader, e.what());
  }
  if (channels < 0) throw FormatError(Kind::MalformedHeader, "negative channel count");

  const std::size_t n = static_cast<std::size_t>(samples);
  const std::size_t nch = static_cast<std::size_t>(channels);
  const std::size_t expected = nch * n * 4 + n;
  const std::size_t available = bytes.size() - payload_at;
  if (available < expected) {
    throw FormatError(Kind::TruncatedFile, "payload has " + std::to_string(available) +
                                               " bytes, header implies " + std::to_string(expected));
  }
  if (available > expected) {
    throw FormatError(Kind::LengthMismatch, "payload has " + std::to_string(available - expected) +
                                                " bytes beyond the declared series");
  }

  const std::uint8_t* p = bytes.data() + payload_at;
  rec.channels.assign(nch, std::vector<float>(n));
  for (std::size_t ch = 0; ch < nch; ++ch) {
    for (std::size_t i = 0; i < n; ++i, p += 4) {
      rec.channels[ch][i] = std::bit_cast<float>(get_u32_le(p));
    }
  }
  rec.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i, ++p) {
    auto g = gesture_from_code(*p);
    if (!g) {
      throw FormatError(Kind::CorruptPayload, "label code " + std::to_string(*p) + " at sample " +
                                                  std::to_string(i));
    }
    rec.labels[i] = *g;
  }
  return rec;
}

void write_recording(const Recording& rec, const std::filesystem::path& path) {
  const auto bytes = serialize_recording(rec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Kind::Io, "write failed for " + path.string());
}

Recording read_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_recording(bytes);
}

Recording recording_from_frames(const std::vector<SampleFrame>& frames, const StreamStats& stats,
                                const ConversionSpec& conversion, double sample_rate) {
  conversion.validate();
  Recording rec;
  rec.header.conversion = conversion;
  rec.header.protocol.sample_rate = sample_rate;
  rec.header.protocol.channels = static_cast<int>(kFrameChannels);
  rec.header.protocol.gestures.clear();
  rec.header.protocol.reps_per_gesture = 1;
  rec.stats = stats;
  rec.channels.assign(kFrameChannels, {});

  std::array<float, kFrameChannels> last{};
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (i > 0) {
      const auto gap = static_cast<std::uint8_t>(f.seq - static_cast<std::uint8_t>(frames[i - 1].seq + 1));
      for (std::uint8_t k = 0; k < gap; ++k) {
        for (std::size_t ch = 0; ch < kFrameChannels; ++ch) rec.channels[ch].push_back(last[ch]);
        rec.labels.push_back(GestureLabel::Neutral);
      }
    }
    for (std::size_t ch = 0; ch < kFrameChannels; ++ch) {
      last[ch] = static_cast<float>(counts_to_volts(f.counts[ch], conversion));
      rec.channels[ch].push_back(last[ch]);
    }
    rec.labels.push_back(GestureLabel::Neutral);
  }
  return rec;
}

std::vector<std::uint8_t> frames_from_recording(const Recording& rec) {
  rec.validate();
  if (rec.channels.size() > kFrameChannels) {
    throw DomainError("frame format carries at most 4 channels");
  }
  std::vector<std::uint8_t> out;
  out.reserve(rec.samples() * kFrameSize);
  for (std::size_t i = 0; i < rec.samples(); ++i) {
    std::array<std::int32_t, kFrameChannels> counts{};
    for (std::size_t ch = 0; ch < rec.channels.size(); ++ch) {
      counts[ch] = volts_to_counts(rec.channels[ch][i], rec.header.conversion);
    }
    const auto frame = encode_frame(static_cast<std::uint8_t>(i & 0xFF), counts);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

}  // namespace semg::ingest
