#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "semg/classifier.hpp"
#include "semg/errors.hpp"
#include "semg/keyvalue.hpp"

namespace semg::pipeline {
namespace {

constexpr char kMagic[] = "SEMGMDL1";
constexpr std::size_t kMagicSize = 8;
constexpr int kModelFormatVersion = 1;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<GestureLabel> template_order(const ClassifierModel& m) {
  std::vector<GestureLabel> g;
  for (const auto& [label, t] : m.templates) g.push_back(label);
  return g;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ClassifierModel& model) {
  model.validate();
  const auto& c = model.config;
  std::ostringstream os;
  os << "format_version = " << kModelFormatVersion << '\n'
     << "subject = " << model.subject_id << '\n'
     << "sample_rate = " << fmt(model.sample_rate) << '\n'
     << "channels = " << model.channels << '\n'
     << "samples = " << model.samples << '\n'
     << "metric = " << model.metric << '\n'
     << "normalization = " << kMapNormalization << '\n'
     << "threshold = " << fmt(model.threshold) << '\n'
     << "gestures = " << join_gestures(template_order(model)) << '\n'
     << "phase = " << to_string(c.phase) << '\n'
     << "window = " << fmt(c.window) << '\n'
     << "rejection_factor = " << fmt(c.rejection_factor) << '\n'
     << "filter.low = " << fmt(c.filter.low) << '\n'
     << "filter.high = " << fmt(c.filter.high) << '\n'
     << "filter.order = " << c.filter.order << '\n'
     << "filter.notch_enabled = " << (c.filter.notch_enabled ? 1 : 0) << '\n'
     << "filter.notch_center = " << fmt(c.filter.notch_center) << '\n'
     << "filter.notch_q = " << fmt(c.filter.notch_q) << '\n'
     << "envelope.cutoff = " << fmt(c.envelope.cutoff) << '\n'
     << "envelope.order = " << c.envelope.order << '\n'
     << "onset.k = " << fmt(c.onset.k) << '\n'
     << "onset.baseline_window = " << fmt(c.onset.baseline_window) << '\n'
     << "onset.refresh = " << fmt(c.onset.refresh) << '\n'
     << "onset.hysteresis = " << fmt(c.onset.hysteresis) << '\n'
     << "onset.absolute_floor = " << fmt(c.onset.absolute_floor) << '\n';
  const std::string header = os.str();

  std::vector<std::uint8_t> out(kMagic, kMagic + kMagicSize);
  put_u32_le(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  for (const auto& [g, t] : model.templates) {
    for (double v : t) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

ClassifierModel parse_model(std::span<const std::uint8_t> bytes) {
  using Kind = FormatError::Kind;
  if (bytes.size() < kMagicSize + 4) throw FormatError(Kind::TruncatedFile, "model file too short");
  if (std::memcmp(bytes.data(), kMagic, kMagicSize - 1) != 0) {
    throw FormatError(Kind::BadMagic, "not a classifier model file");
  }
  if (bytes[kMagicSize - 1] != static_cast<std::uint8_t>(kMagic[kMagicSize - 1])) {
    throw FormatError(Kind::UnsupportedVersion, "unknown model container tag");
  }
  const std::uint32_t header_len = get_u32_le(bytes.data() + kMagicSize);
  const std::size_t payload_at = kMagicSize + 4 + std::size_t{header_len};
  if (bytes.size() < payload_at) throw FormatError(Kind::TruncatedFile, "model header cut short");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + kMagicSize + 4), header_len);

  ClassifierModel m;
  std::vector<GestureLabel> order;
  try {
    const auto kv = KeyValueConfig::parse(text);
    int version = 0;
    kv.take("format_version", version);
    if (version != kModelFormatVersion) {
      throw FormatError(Kind::UnsupportedVersion, "model format_version " + std::to_string(version));
    }
    for (const char* key : {"channels", "samples", "threshold", "gestures"}) {
      if (!kv.contains(key)) throw FormatError(Kind::MalformedHeader, std::string("missing key '") + key + "'");
    }
    std::uint64_t channels = 0, samples = 0;
    int notch = 1;
    kv.take("subject", m.subject_id);
    kv.take("sample_rate", m.sample_rate);
    kv.take("channels", channels);
    kv.take("samples", samples);
    kv.take("metric", m.metric);
    kv.take_string("normalization");
    kv.take("threshold", m.threshold);
    order = parse_gesture_list(*kv.take_string("gestures"));
    auto& c = m.config;
    if (auto p = kv.take_string("phase")) c.phase = *p == "causal" ? Phase::Causal : Phase::ZeroPhase;
    kv.take("window", c.window);
    kv.take("rejection_factor", c.rejection_factor);
    kv.take("filter.low", c.filter.low);
    kv.take("filter.high", c.filter.high);
    kv.take("filter.order", c.filter.order);
    kv.take("filter.notch_enabled", notch);
    c.filter.notch_enabled = notch != 0;
    kv.take("filter.notch_center", c.filter.notch_center);
    kv.take("filter.notch_q", c.filter.notch_q);
    kv.take("envelope.cutoff", c.envelope.cutoff);
    kv.take("envelope.order", c.envelope.order);
    kv.take("onset.k", c.onset.k);
    kv.take("onset.baseline_window", c.onset.baseline_window);
    kv.take("onset.refresh", c.onset.refresh);
    kv.take("onset.hysteresis", c.onset.hysteresis);
    kv.take("onset.absolute_floor", c.onset.absolute_floor);
    m.channels = static_cast<std::size_t>(channels);
    m.samples = static_cast<std::size_t>(samples);
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(Kind::MalformedHeader, e.what());
  }

  const std::size_t per = m.channels * m.samples;
  const std::size_t expected = order.size() * per * 4;
  const std::size_t available = bytes.size() - payload_at;
  if (available < expected) throw FormatError(Kind::TruncatedFile, "template payload cut short");
  if (available > expected) throw FormatError(Kind::LengthMismatch, "bytes beyond the declared templates");
  const std::uint8_t* p = bytes.data() + payload_at;
  for (auto g : order) {
    std::vector<double> t(per);
    for (std::size_t i = 0; i < per; ++i, p += 4) t[i] = std::bit_cast<float>(get_u32_le(p));
    m.templates.emplace(g, std::move(t));
  }
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw FormatError(Kind::CorruptPayload, e.what());
  }
  return m;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Kind::Io, "write failed for " + path.string());
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_model(bytes);
}

}  // namespace semg::pipeline
