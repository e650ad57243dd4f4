#include "semg/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semg/errors.hpp"

namespace semg::pipeline {

void PipelineConfig::validate(double fs) const {
  filter.validate(fs);
  envelope.validate(fs, filter);
  onset.validate();
  if (!(window > 0.0)) throw DomainError("map window must be positive");
  if (!(rejection_factor > 0.0)) throw DomainError("rejection factor must be positive");
}

void ClassifierModel::validate() const {
  if (metric != kFrobeniusMetric) throw DomainError("unsupported metric '" + metric + "'");
  if (channels == 0 || samples == 0) throw DomainError("model maps have no extent");
  if (templates.empty()) throw DomainError("model has no templates");
  for (const auto& [g, t] : templates) {
    if (g == GestureLabel::Neutral) throw DomainError("neutral cannot have a template");
    if (t.size() != channels * samples) throw DomainError("template shape differs from the model");
  }
  if (!(threshold >= 0.0)) throw DomainError("rejection threshold must be >= 0");
}

double frobenius_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("map shapes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

ClassifierModel train(const std::vector<TmaMap>& maps, const std::vector<GestureLabel>& labels,
                      const PipelineConfig& config, double sample_rate,
                      const std::vector<GestureLabel>& expected) {
  if (maps.size() != labels.size()) throw DomainError("one label per map required");
  std::map<GestureLabel, std::vector<const TmaMap*>> by_class;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (labels[i] != GestureLabel::Neutral) by_class[labels[i]].push_back(&maps[i]);
  }
  std::vector<GestureLabel> missing;
  for (auto g : expected) {
    if (by_class[g].size() < 2) missing.push_back(g);
  }
  if (!missing.empty()) {
    throw DomainError("training data lacks gestures (need >= 2 maps each): " + join_gestures(missing));
  }
  if (maps.empty()) throw DomainError("no training maps");
  const std::size_t channels = maps.front().channels;
  const std::size_t samples = maps.front().samples;
  for (const auto& m : maps) {
    if (m.channels != channels || m.samples != samples) throw DomainError("training maps differ in shape");
  }

  ClassifierModel model;
  model.sample_rate = sample_rate;
  model.channels = channels;
  model.samples = samples;
  model.config = config;
  double max_intra = 0.0;
  for (const auto& [g, members] : by_class) {
    if (members.empty()) continue;
    std::vector<double> mean(channels * samples, 0.0);
    for (const auto* m : members) {
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += m->values[i];
    }
    for (double& v : mean) v /= static_cast<double>(members.size());
    for (const auto* m : members) max_intra = std::max(max_intra, frobenius_distance(m->values, mean));
    model.templates.emplace(g, std::move(mean));
  }
  model.threshold = config.rejection_factor * max_intra;
  return model;
}

Decision classify(const ClassifierModel& model, const TmaMap& map) {
  if (map.channels != model.channels || map.samples != model.samples) {
    throw DomainError("map is " + std::to_string(map.channels) + "x" + std::to_string(map.samples) +
                      ", model expects " + std::to_string(model.channels) + "x" +
                      std::to_string(model.samples));
  }
  Decision d;
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  GestureLabel best_g = GestureLabel::Neutral;
  for (const auto& [g, t] : model.templates) {  // std::map iterates in enum order
    const double dist = frobenius_distance(map.values, t);
    if (dist < best) {
      second = best;
      best = dist;
      best_g = g;
    } else if (dist < second) {
      second = dist;
    }
  }
  d.distance = best;
  d.score = std::isinf(second) ? 0.0 : second - best;
  d.label = (map.degenerate || best > model.threshold) ? GestureLabel::Neutral : best_g;
  return d;
}

}  // namespace semg::pipeline
