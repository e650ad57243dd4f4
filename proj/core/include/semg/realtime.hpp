#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "semg/classifier.hpp"
#include "semg/frame.hpp"
#include "semg/stream_decoder.hpp"

namespace semg::pipeline {

struct StreamDecision {
  std::size_t onset = 0;  // sample index of the detected onset
  std::size_t sample = 0;  // sample index at which the decision was made
  Decision decision;
};

/// Sample-by-sample counterpart of the offline pipeline: causal band-pass,
/// notch and envelope per channel, onset detection on the channel maximum,
/// then one decision per onset once the map window has filled.
class RealtimeClassifier {
 public:
  RealtimeClassifier(ClassifierModel model, ingest::ConversionSpec conversion = {});

  std::optional<StreamDecision> push(std::span<const double> volts);
  std::optional<StreamDecision> push(const ingest::SampleFrame& frame);

  std::size_t samples() const { return n_; }
  const ClassifierModel& model() const { return model_; }

 private:
  ClassifierModel model_;
  ingest::ConversionSpec conversion_;
  std::vector<dsp::SosFilter> pre_;
  std::vector<dsp::SosFilter> env_;
  OnsetDetector onset_;
  std::size_t window_;
  std::size_t n_ = 0;
  std::optional<std::size_t> collecting_since_;
  TmaMap map_;
  std::size_t filled_ = 0;
};

struct RealtimeRun {
  std::vector<StreamDecision> decisions;
  ingest::StreamStats stats;
  std::size_t samples = 0;
  double elapsed_seconds = 0.0;
};

/// Decoder thread feeds frames through a bounded channel to the classifier
/// running on the calling thread.
RealtimeRun run_realtime(std::span<const std::uint8_t> bytes, const ClassifierModel& model,
                         const ingest::ConversionSpec& conversion = {}, std::size_t chunk_bytes = 256,
                         std::size_t channel_capacity = 64);

}  // namespace semg::pipeline
