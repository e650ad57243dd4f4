#include "semg/realtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "semg/channel.hpp"
#include "semg/errors.hpp"

namespace semg::pipeline {

RealtimeClassifier::RealtimeClassifier(ClassifierModel model, ingest::ConversionSpec conversion)
    : model_(std::move(model)),
      conversion_(conversion),
      onset_(model_.config.onset, model_.sample_rate) {
  model_.validate();
  conversion_.validate();
  const double fs = model_.sample_rate;
  model_.config.validate(fs);
  const auto pre = preprocess_sections(fs, model_.config.filter);
  const auto env = envelope_sections(fs, model_.config.envelope);
  for (std::size_t ch = 0; ch < model_.channels; ++ch) {
    pre_.emplace_back(pre);
    env_.emplace_back(env);
  }
  window_ = model_.samples;
  map_.channels = model_.channels;
  map_.samples = window_;
  map_.length = model_.config.window;
  map_.values.assign(model_.channels * window_, 0.0);
}

std::optional<StreamDecision> RealtimeClassifier::push(std::span<const double> volts) {
  if (volts.size() < model_.channels) {
    throw DomainError("sample carries " + std::to_string(volts.size()) + " channels, model needs " +
                      std::to_string(model_.channels));
  }
  const std::size_t i = n_++;
  std::array<double, ingest::kFrameChannels> env{};
  std::vector<double> wide;
  double* e = env.data();
  if (model_.channels > env.size()) {
    wide.resize(model_.channels);
    e = wide.data();
  }
  double peak = 0.0;
  for (std::size_t ch = 0; ch < model_.channels; ++ch) {
    e[ch] = std::max(0.0, env_[ch].process(std::abs(pre_[ch].process(volts[ch]))));
    peak = std::max(peak, e[ch]);
  }
  if (onset_.push(peak) && !collecting_since_) {
    collecting_since_ = i;
    filled_ = 0;
  }
  if (!collecting_since_) return std::nullopt;
  for (std::size_t ch = 0; ch < model_.channels; ++ch) map_.values[ch * window_ + filled_] = e[ch];
  ++filled_;
  if (!collecting_since_ || filled_ < window_) return std::nullopt;

  TmaMap m = map_;
  m.start = static_cast<double>(*collecting_since_) / model_.sample_rate;
  const double pk = m.peak();
  if (pk > 0.0) {
    for (double& v : m.values) v /= pk;
  } else {
    m.degenerate = true;
  }
  StreamDecision d{*collecting_since_, i, classify(model_, m)};
  collecting_since_.reset();
  return d;
}

std::optional<StreamDecision> RealtimeClassifier::push(const ingest::SampleFrame& frame) {
  std::array<double, ingest::kFrameChannels> v{};
  for (std::size_t ch = 0; ch < v.size(); ++ch) v[ch] = ingest::counts_to_volts(frame.counts[ch], conversion_);
  return push(v);
}

RealtimeRun run_realtime(std::span<const std::uint8_t> bytes, const ClassifierModel& model,
                         const ingest::ConversionSpec& conversion, std::size_t chunk_bytes,
                         std::size_t channel_capacity) {
  if (chunk_bytes == 0) throw DomainError("chunk size must be positive");
  RealtimeClassifier clf(model, conversion);
  BoundedChannel<std::vector<ingest::SampleFrame>> channel(channel_capacity);
  ingest::StreamStats stats;

  const auto t0 = std::chrono::steady_clock::now();
  std::jthread producer([&] {
    ingest::StreamDecoder dec;
    for (std::size_t at = 0; at < bytes.size(); at += chunk_bytes) {
      const auto chunk = bytes.subspan(at, std::min(chunk_bytes, bytes.size() - at));
      auto frames = dec.feed(chunk);
      if (!frames.empty() && !channel.push(std::move(frames))) break;
    }
    dec.finish();
    stats = dec.stats();
    channel.close();
  });

  RealtimeRun run;
  while (auto batch = channel.pop()) {
    for (const auto& f : *batch) {
      if (auto d = clf.push(f)) run.decisions.push_back(*d);
    }
  }
  producer.join();
  run.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.stats = stats;
  run.samples = clf.samples();
  return run;
}

}  // namespace semg::pipeline
