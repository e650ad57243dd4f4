#include <algorithm>
#include <cmath>

#include "semg/errors.hpp"
#include "semg/pipeline.hpp"

namespace semg::pipeline {
namespace {

double median_of(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t to_samples(double seconds, double fs) {
  return static_cast<std::size_t>(std::llround(seconds * fs));
}

}  // namespace

void OnsetSpec::validate() const {
  if (!(k > 0.0)) throw DomainError("onset factor k must be positive");
  if (!(baseline_window > 0.0)) throw DomainError("baseline window must be positive");
  if (!(refresh > 0.0)) throw DomainError("baseline refresh must be positive");
  if (!(hysteresis >= 0.0)) throw DomainError("hysteresis must be >= 0");
  if (!(absolute_floor >= 0.0)) throw DomainError("absolute floor must be >= 0");
}

OnsetDetector::OnsetDetector(const OnsetSpec& spec, double fs, std::optional<double> initial_baseline)
    : spec_(spec), initial_(initial_baseline) {
  spec.validate();
  if (!(fs > 0.0)) throw DomainError("sample rate must be positive");
  window_ = std::max<std::size_t>(1, to_samples(spec.baseline_window, fs));
  refresh_ = std::max<std::size_t>(1, to_samples(spec.refresh, fs));
  hysteresis_ = to_samples(spec.hysteresis, fs);
}

void OnsetDetector::refresh_baseline() {
  if (history_.size() >= window_ || (!initial_ && !history_.empty())) {
    scratch_.assign(history_.begin(), history_.end());
    baseline_ = median_of(scratch_);
  } else if (initial_) {
    baseline_ = initial_;
  }
}

bool OnsetDetector::push(double value) {
  if (n_ % refresh_ == 0) refresh_baseline();
  bool onset = false;
  if (baseline_) {
    const double threshold = std::max(spec_.k * *baseline_, spec_.absolute_floor);
    const bool armed = !last_onset_ || n_ - *last_onset_ >= hysteresis_;
    if (armed && value > threshold) {
      onset = true;
      last_onset_ = n_;
    }
  }
  history_.push_back(value);
  if (history_.size() > window_) history_.pop_front();
  ++n_;
  return onset;
}

std::vector<std::size_t> detect_onsets(const std::vector<std::vector<double>>& envelopes, double fs,
                                       const OnsetSpec& spec, std::optional<double> initial_baseline) {
  OnsetDetector det(spec, fs, initial_baseline);
  std::vector<std::size_t> out;
  if (envelopes.empty()) return out;
  const std::size_t n = envelopes.front().size();
  for (const auto& e : envelopes) {
    if (e.size() != n) throw DomainError("envelopes are not aligned");
  }
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (const auto& e : envelopes) m = std::max(m, e[i]);
    if (det.push(m)) out.push_back(i);
  }
  return out;
}

std::optional<double> detect_onset(const std::vector<std::vector<double>>& envelopes, double fs,
                                   const OnsetSpec& spec, std::optional<double> initial_baseline) {
  const auto all = detect_onsets(envelopes, fs, spec, initial_baseline);
  if (all.empty()) return std::nullopt;
  return static_cast<double>(all.front()) / fs;
}

double rest_baseline(const std::vector<std::vector<double>>& envelopes,
                     const std::vector<bool>& rest_mask) {
  std::vector<double> v;
  for (std::size_t i = 0; i < rest_mask.size(); ++i) {
    if (!rest_mask[i]) continue;
    double m = 0.0;
    for (const auto& e : envelopes) m = std::max(m, e.at(i));
    v.push_back(m);
  }
  if (v.empty()) throw DomainError("no rest samples for the baseline");
  return median_of(v);
}

}  // namespace semg::pipeline
