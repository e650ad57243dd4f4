#include <algorithm>
#include <cmath>

#include "semg/errors.hpp"
#include "semg/pipeline.hpp"

namespace semg::pipeline {
namespace {

std::vector<double> run(const dsp::Sos& sos, std::span<const double> x, Phase phase) {
  return phase == Phase::ZeroPhase ? dsp::sosfiltfilt(sos, x) : dsp::sosfilt(sos, x);
}

}  // namespace

std::string_view to_string(Phase p) noexcept {
  return p == Phase::ZeroPhase ? "zero_phase" : "causal";
}

void FilterSpec::validate(double fs) const {
  if (!(fs > 0.0)) throw DomainError("sample rate must be positive");
  if (!(low > 0.0 && low < high && high < fs / 2.0)) {
    throw DomainError("band-pass needs 0 < low < high < fs/2");
  }
  if (order < 1) throw DomainError("band-pass order must be >= 1");
  if (notch_enabled) {
    if (!(notch_center > low && notch_center < high)) {
      throw DomainError("notch center must lie inside the pass band (or disable the notch)");
    }
    if (!(notch_q > 0.0)) throw DomainError("notch quality factor must be positive");
  }
}

void EnvelopeSpec::validate(double fs, const FilterSpec& filter) const {
  if (!(cutoff > 0.0 && cutoff < fs / 2.0)) throw DomainError("envelope cutoff must lie in (0, fs/2)");
  if (!(cutoff < filter.low)) throw DomainError("envelope cutoff must be below the band-pass low edge");
  if (order < 1) throw DomainError("envelope order must be >= 1");
}

dsp::Sos bandpass_sections(double fs, const FilterSpec& spec) {
  FilterSpec band = spec;
  band.notch_enabled = false;
  band.validate(fs);
  auto sos = dsp::butterworth_highpass(spec.order, spec.low, fs);
  const auto lp = dsp::butterworth_lowpass(spec.order, spec.high, fs);
  sos.insert(sos.end(), lp.begin(), lp.end());
  return sos;
}

dsp::Sos notch_sections(double fs, double center, double q) {
  return dsp::notch_filter(center, q, fs);
}

dsp::Sos preprocess_sections(double fs, const FilterSpec& spec) {
  spec.validate(fs);
  auto sos = bandpass_sections(fs, spec);
  if (spec.notch_enabled) {
    const auto n = notch_sections(fs, spec.notch_center, spec.notch_q);
    sos.insert(sos.end(), n.begin(), n.end());
  }
  return sos;
}

dsp::Sos envelope_sections(double fs, const EnvelopeSpec& spec) {
  if (!(spec.cutoff > 0.0 && spec.cutoff < fs / 2.0)) {
    throw DomainError("envelope cutoff must lie in (0, fs/2)");
  }
  return dsp::butterworth_lowpass(spec.order, spec.cutoff, fs);
}

std::vector<double> bandpass(std::span<const double> x, double fs, const FilterSpec& spec, Phase phase) {
  return run(bandpass_sections(fs, spec), x, phase);
}

std::vector<double> notch(std::span<const double> x, double fs, double center, double q, Phase phase) {
  return run(notch_sections(fs, center, q), x, phase);
}

std::vector<double> envelope(std::span<const double> x, double fs, const EnvelopeSpec& spec,
                             Phase phase) {
  std::vector<double> r(x.size());
  std::transform(x.begin(), x.end(), r.begin(), [](double v) { return std::abs(v); });
  auto y = run(envelope_sections(fs, spec), r, phase);
  for (double& v : y) v = std::max(v, 0.0);
  return y;
}

std::vector<std::vector<double>> channel_envelopes(const std::vector<std::vector<double>>& channels,
                                                   double fs, const FilterSpec& filter,
                                                   const EnvelopeSpec& env, Phase phase) {
  env.validate(fs, filter);
  const auto pre = preprocess_sections(fs, filter);
  std::vector<std::vector<double>> out;
  out.reserve(channels.size());
  for (const auto& ch : channels) out.push_back(envelope(run(pre, ch, phase), fs, env, phase));
  return out;
}

double TmaMap::peak() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

TmaMap tma_map(const std::vector<std::vector<double>>& envelopes, std::size_t onset, double fs,
               double window) {
  if (envelopes.empty()) throw DomainError("no envelope channels");
  if (!(fs > 0.0) || !(window > 0.0)) throw DomainError("window and sample rate must be positive");
  const auto len = static_cast<std::size_t>(std::llround(window * fs));
  for (const auto& e : envelopes) {
    if (onset + len > e.size()) {
      throw DomainError("map window [" + std::to_string(onset) + ", " + std::to_string(onset + len) +
                        ") leaves the recording of " + std::to_string(e.size()) + " samples");
    }
  }
  TmaMap m;
  m.channels = envelopes.size();
  m.samples = len;
  m.start = static_cast<double>(onset) / fs;
  m.length = window;
  m.values.resize(m.channels * len);
  for (std::size_t ch = 0; ch < m.channels; ++ch) {
    for (std::size_t i = 0; i < len; ++i) m.values[ch * len + i] = std::max(0.0, envelopes[ch][onset + i]);
  }
  const double pk = m.peak();
  if (!(pk > 0.0)) {
    std::fill(m.values.begin(), m.values.end(), 0.0);
    m.degenerate = true;
  } else {
    for (double& v : m.values) v /= pk;
  }
  return m;
}

}  // namespace semg::pipeline
