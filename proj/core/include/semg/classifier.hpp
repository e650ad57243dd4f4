#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "semg/gesture.hpp"
#include "semg/pipeline.hpp"

namespace semg::pipeline {

/// Everything needed to turn a raw recording into maps the same way at
/// training and at inference time.
struct PipelineConfig {
  FilterSpec filter{};
  EnvelopeSpec envelope{};
  OnsetSpec onset{};
  double window = 3.0;            // s of envelope per map, from onset
  double rejection_factor = 1.5;  // neutral threshold = factor * max intra-class distance
  Phase phase = Phase::ZeroPhase;

  void validate(double fs) const;
};

inline constexpr std::string_view kFrobeniusMetric = "frobenius";

/// Nearest-mean-template classifier over unit-peak TMA maps.
struct ClassifierModel {
  std::string subject_id;
  double sample_rate = 250.0;
  std::size_t channels = 0;
  std::size_t samples = 0;
  std::string metric{kFrobeniusMetric};
  double threshold = 0.0;
  PipelineConfig config{};
  std::map<GestureLabel, std::vector<double>> templates;  // row-major channels x samples

  void validate() const;
};

double frobenius_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Per-gesture mean maps and the neutral-rejection threshold. Every gesture in
/// `expected` needs at least two maps; otherwise DomainError names the gaps.
ClassifierModel train(const std::vector<TmaMap>& maps, const std::vector<GestureLabel>& labels,
                      const PipelineConfig& config = {}, double sample_rate = 250.0,
                      const std::vector<GestureLabel>& expected = {kActiveGestures.begin(),
                                                                   kActiveGestures.end()});

struct Decision {
  GestureLabel label = GestureLabel::Neutral;
  double score = 0.0;     // second-best minus best distance; 0 on a tie
  double distance = 0.0;  // distance to the best template
};

/// Nearest template; Neutral when the best distance exceeds the threshold or
/// the map is degenerate. Ties go to the earlier gesture in enum order.
Decision classify(const ClassifierModel& model, const TmaMap& map);

// File layout: "SEMGMDL1", u32 LE header length, `key = value` header, then
// float32 LE templates in the header's gesture order.
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_model(const ClassifierModel& model);
ClassifierModel parse_model(std::span<const std::uint8_t> bytes);

}  // namespace semg::pipeline
