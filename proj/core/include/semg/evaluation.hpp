#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "semg/classifier.hpp"
#include "semg/recording.hpp"

namespace semg::pipeline {

/// One hold window of a recording and the map extracted at its onset.
struct RepMap {
  GestureLabel gesture = GestureLabel::Neutral;
  int rep = 0;                 // index among the reps of this gesture
  std::size_t hold_start = 0;  // sample, from the label track
  std::optional<std::size_t> onset;
  std::optional<TmaMap> map;   // empty when no onset fell inside the hold
  std::optional<TmaMap> labeled_map;  // map at hold_start, used for training only
};

/// Envelopes, onsets and one entry per labeled hold window. The rest
/// baseline for the first cycle comes from the Neutral-labeled samples.
std::vector<RepMap> extract_rep_maps(const ingest::Recording& rec, const PipelineConfig& config);

/// Trains on every rep; reps where no onset was detected contribute the map
/// taken at their labeled hold start. Every gesture in `expected` must occur
/// (empty: whatever gestures the recording contains).
ClassifierModel train_subject(const ingest::Recording& rec, const PipelineConfig& config = {},
                              const std::vector<GestureLabel>& expected = {});

struct SplitSpec {
  double train_fraction = 0.5;
  std::uint64_t seed = kDefaultSeed;
};

struct EvaluationReport {
  std::vector<GestureLabel> gestures{kActiveGestures.begin(), kActiveGestures.end()};
  std::vector<std::string> subjects;
  /// cells[g][s], percent; empty when subject s never performed gesture g.
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<std::optional<double>> gesture_average;
  std::vector<std::optional<double>> subject_average;
  double overall = 0.0;
  /// confusion[true gesture row][predicted label code], predicted includes Neutral.
  std::vector<std::array<std::size_t, kGestureCount>> confusion;
  std::vector<std::size_t> test_counts;
  Phase phase = Phase::ZeroPhase;
  std::uint64_t split_seed = kDefaultSeed;
};

/// Per subject: stratified split by repetition index, train on one part,
/// classify the other. Training reps without an onset fall back to the labeled
/// hold start; a test rep without an onset is predicted Neutral.
/// Throws DomainError when a gesture has too few reps to split.
EvaluationReport evaluate(const std::vector<ingest::Recording>& recordings,
                          const PipelineConfig& config = {}, const SplitSpec& split = {});

/// Classifies every rep of each recording with its paired, already trained model.
EvaluationReport evaluate_models(const std::vector<ingest::Recording>& recordings,
                                 const std::vector<ClassifierModel>& models);

/// Table layout: one row per gesture caption, one column per subject, Avg.
std::string report_text(const EvaluationReport& report);
/// `gesture,subject,accuracy_pct` rows; subject "avg" for the Avg column.
std::string report_csv(const EvaluationReport& report);
/// Rows are true gestures, columns predicted labels including neutral.
std::string confusion_text(const EvaluationReport& report);

}  // namespace semg::pipeline
