#include "semg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semg/afe.hpp"
#include "semg/dsp/biquad.hpp"
#include "semg/errors.hpp"
#include "semg/rng.hpp"

namespace semg {

void ProtocolSpec::validate() const {
  if (!(sample_rate > 0.0)) throw DomainError("protocol sample_rate must be positive");
  if (channels < 1) throw DomainError("protocol needs at least one channel");
  if (!(hold > 0.0)) throw DomainError("protocol hold must be positive");
  if (!(rest >= 0.0)) throw DomainError("protocol rest must be >= 0");
  if (reps_per_gesture < 1) throw DomainError("protocol reps_per_gesture must be >= 1");
  for (auto g : gestures) {
    if (g == GestureLabel::Neutral) throw DomainError("neutral is not a protocol gesture");
  }
}

std::size_t ProtocolSpec::hold_samples() const {
  return static_cast<std::size_t>(std::llround(hold * sample_rate));
}

std::size_t ProtocolSpec::rest_samples() const {
  return static_cast<std::size_t>(std::llround(rest * sample_rate));
}

}  // namespace semg

namespace semg::synth {
namespace {

using std::numbers::pi;

constexpr double kCarrierLow = 20.0;
constexpr double kCarrierHigh = 120.0;

void normalize_rms(std::vector<double>& x, double target) {
  double ss = 0.0;
  for (double v : x) ss += v * v;
  if (x.empty() || ss <= 0.0) return;
  const double k = target / std::sqrt(ss / static_cast<double>(x.size()));
  for (double& v : x) v *= k;
}

std::vector<double> gaussian(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

// Unit-rms band-limited carrier for one channel.
std::vector<double> carrier(std::uint64_t seed, std::size_t channel, std::size_t n, double fs) {
  const double high = std::min(kCarrierHigh, 0.45 * fs);
  if (!(high > kCarrierLow)) {
    throw ConfigError("sample rate " + std::to_string(fs) + " Hz too low for the sEMG carrier band");
  }
  Rng rng(derive_seed(seed, "carrier", channel));
  auto x = gaussian(rng, n);
  auto sos = dsp::butterworth_highpass(4, kCarrierLow, fs);
  const auto lp = dsp::butterworth_lowpass(4, high, fs);
  sos.insert(sos.end(), lp.begin(), lp.end());
  x = dsp::sosfilt(sos, x);
  normalize_rms(x, 1.0);
  return x;
}

// Biexponential motion burst, unit peak.
double burst_shape(double t, double duration) {
  const double rise = duration / 8.0;
  const double decay = duration / 3.0;
  const double tpk = std::log(decay / rise) * rise * decay / (decay - rise);
  const double peak = std::exp(-tpk / decay) - std::exp(-tpk / rise);
  return (std::exp(-t / decay) - std::exp(-t / rise)) / peak;
}

void add_interference(TerminalPair& tp, const InterferenceModel& noise, std::uint64_t seed,
                      std::size_t channel) {
  const std::size_t n = tp.size();
  const double fs = tp.sample_rate;

  if (noise.powerline_common_mode_amplitude > 0.0) {
    Rng rng(derive_seed(seed, "powerline", channel));
    const double phase = rng.uniform(0.0, 2.0 * pi);
    const double w = 2.0 * pi * noise.powerline_freq / fs;
    for (std::size_t i = 0; i < n; ++i) {
      const double v =
          noise.powerline_common_mode_amplitude * std::sin(w * static_cast<double>(i) + phase);
      tp.e1[i] += v;
      tp.e2[i] += v;
    }
  }

  if (noise.white_noise_density > 0.0) {
    Rng rng(derive_seed(seed, "white", channel));
    const double sd = noise.white_noise_density * std::sqrt(fs / 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      tp.e1[i] += sd * rng.normal();
      tp.e2[i] += sd * rng.normal();
    }
  }

  if (noise.baseline_wander_amplitude > 0.0 && n > 0) {
    Rng rng(derive_seed(seed, "wander", channel));
    const auto lp = dsp::butterworth_lowpass(2, std::min(noise.baseline_wander_corner, 0.45 * fs), fs);
    for (auto* side : {&tp.e1, &tp.e2}) {
      auto w = dsp::sosfilt(lp, gaussian(rng, n));
      normalize_rms(w, noise.baseline_wander_amplitude);
      for (std::size_t i = 0; i < n; ++i) (*side)[i] += w[i];
    }
  }

  if (noise.motion_burst_rate > 0.0 && noise.motion_amplitude > 0.0) {
    Rng rng(derive_seed(seed, "motion", channel));
    const double span = 2.0 * noise.motion_duration;
    const double total = static_cast<double>(n) / fs;
    double t0 = 0.0;
    while (true) {
      t0 += -std::log(1.0 - rng.uniform()) / noise.motion_burst_rate;
      if (t0 >= total) break;
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const auto first = static_cast<std::size_t>(std::ceil(t0 * fs));
      const auto last = std::min(n, static_cast<std::size_t>(std::ceil((t0 + span) * fs)));
      for (std::size_t i = first; i < last; ++i) {
        const double t = static_cast<double>(i) / fs - t0;
        tp.e1[i] += sign * noise.motion_amplitude * burst_shape(t, noise.motion_duration);
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// templates

ActivationTemplate::ActivationTemplate(std::size_t channels) : channels_(channels) {
  if (channels == 0) throw DomainError("activation template needs at least one channel");
  for (auto& row : cells_) row.assign(channels, ActivationCell{});
}

ActivationCell& ActivationTemplate::at(GestureLabel g, std::size_t channel) {
  if (channel >= channels_) {
    throw DomainError("channel " + std::to_string(channel) + " out of range (template has " +
                      std::to_string(channels_) + ")");
  }
  return cells_[index_of(g)][channel];
}

const ActivationCell& ActivationTemplate::at(GestureLabel g, std::size_t channel) const {
  return const_cast<ActivationTemplate*>(this)->at(g, channel);
}

void ActivationTemplate::validate(double hold) const {
  for (std::size_t gi = 0; gi < kGestureCount; ++gi) {
    for (std::size_t ch = 0; ch < channels_; ++ch) {
      const auto& c = cells_[gi][ch];
      const std::string where = std::string(name_of(static_cast<GestureLabel>(gi))) + "/ch" +
                                std::to_string(ch);
      if (gi == index_of(GestureLabel::Neutral) && c.plateau != 0.0) {
        throw DomainError("neutral plateau must be 0 (" + where + ")");
      }
      if (!(c.plateau >= 0.0)) throw DomainError("plateau must be >= 0 (" + where + ")");
      if (!(c.rise >= 0.0) || !(c.fall >= 0.0)) {
        throw DomainError("rise and fall must be >= 0 (" + where + ")");
      }
      if (!(c.rise + c.fall < hold)) throw DomainError("rise + fall must be < hold (" + where + ")");
      if (!(c.jitter >= 0.0)) throw DomainError("jitter must be >= 0 (" + where + ")");
    }
  }
}

void ActivationTemplate::scale(GestureLabel g, double factor) {
  for (auto& c : cells_[index_of(g)]) c.plateau *= factor;
}

ActivationTemplate default_template() {
  // Plateaus in mV; each finger gesture has its own dominant channel, hand
  // closure recruits all four.
  static constexpr double kPattern[5][4] = {
      {1.0, 0.3, 0.2, 0.5},  // thumb
      {0.3, 1.0, 0.3, 0.2},  // index
      {0.2, 0.4, 1.0, 0.3},  // middle
      {0.3, 0.2, 0.4, 1.0},  // ring
      {0.9, 0.9, 0.8, 0.9},  // hand closure
  };
  ActivationTemplate t(4);
  for (std::size_t k = 0; k < kActiveGestures.size(); ++k) {
    for (std::size_t ch = 0; ch < 4; ++ch) t.at(kActiveGestures[k], ch).plateau = kPattern[k][ch] * 1e-3;
  }
  return t;
}

ActivationTemplate subject_template(std::size_t subject_index, std::uint64_t seed) {
  auto t = default_template();
  Rng rng(derive_seed(seed, "subject-template", subject_index));
  for (auto g : kActiveGestures) {
    for (std::size_t ch = 0; ch < t.channels(); ++ch) t.at(g, ch).plateau *= rng.uniform(0.7, 1.3);
  }
  return t;
}

InterferenceModel InterferenceModel::none() {
  InterferenceModel m;
  m.powerline_common_mode_amplitude = 0.0;
  m.white_noise_density = 0.0;
  m.baseline_wander_amplitude = 0.0;
  m.motion_burst_rate = 0.0;
  m.motion_amplitude = 0.0;
  return m;
}

void InterferenceModel::validate() const {
  if (!(powerline_freq > 0.0)) throw DomainError("powerline_freq must be positive");
  if (!(powerline_common_mode_amplitude >= 0.0)) throw DomainError("powerline amplitude must be >= 0");
  if (!(white_noise_density >= 0.0)) throw DomainError("white_noise_density must be >= 0");
  if (!(baseline_wander_amplitude >= 0.0)) throw DomainError("baseline wander amplitude must be >= 0");
  if (!(baseline_wander_corner > 0.0)) throw DomainError("baseline wander corner must be positive");
  if (!(motion_burst_rate >= 0.0)) throw DomainError("motion burst rate must be >= 0");
  if (!(motion_amplitude >= 0.0)) throw DomainError("motion amplitude must be >= 0");
  if (!(motion_duration > 0.0)) throw DomainError("motion duration must be positive");
}

std::vector<double> TerminalPair::differential() const {
  std::vector<double> d(e1.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = e1[i] - e2[i];
  return d;
}

void TerminalPair::validate() const {
  if (e1.size() != e2.size()) throw DomainError("terminal series differ in length");
  if (!(sample_rate > 0.0)) throw DomainError("terminal sample rate must be positive");
  for (std::size_t i = 0; i < e1.size(); ++i) {
    if (!std::isfinite(e1[i]) || !std::isfinite(e2[i])) {
      throw DomainError("non-finite terminal sample at index " + std::to_string(i));
    }
  }
}

// ---------------------------------------------------------------------------
// generation

double activation_envelope(GestureLabel gesture, std::size_t channel, double t,
                           const ActivationTemplate& tmpl, double hold) {
  const auto& c = tmpl.at(gesture, channel);
  if (!(t >= 0.0)) throw DomainError("activation time must be >= 0");
  if (c.plateau == 0.0 || t >= hold) return 0.0;
  if (t < c.rise) return c.plateau * t / c.rise;
  if (t > hold - c.fall) return c.plateau * (hold - t) / c.fall;
  return c.plateau;
}

SessionTerminals generate_terminals(const ProtocolSpec& protocol, const ActivationTemplate& tmpl,
                                    const InterferenceModel& noise, std::uint64_t seed) {
  protocol.validate();
  tmpl.validate(protocol.hold);
  noise.validate();
  const auto nch = static_cast<std::size_t>(protocol.channels);
  if (tmpl.channels() < nch) {
    throw DomainError("template has " + std::to_string(tmpl.channels()) + " channels, protocol needs " +
                      std::to_string(nch));
  }
  const double fs = protocol.sample_rate;
  if (noise.powerline_common_mode_amplitude > 0.0 && !(noise.powerline_freq < fs / 2.0)) {
    throw DomainError("powerline frequency is not below Nyquist");
  }

  const std::size_t n = protocol.total_samples();
  const std::size_t hold_n = protocol.hold_samples();
  const std::size_t cycle_n = protocol.cycle_samples();
  const auto reps = static_cast<std::size_t>(protocol.reps_per_gesture);

  SessionTerminals out;
  out.labels.assign(n, GestureLabel::Neutral);
  for (std::size_t b = 0; b < protocol.gestures.size(); ++b) {
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t start = (b * reps + r) * cycle_n;
      std::fill_n(out.labels.begin() + static_cast<std::ptrdiff_t>(start), hold_n,
                  protocol.gestures[b]);
    }
  }

  for (std::size_t ch = 0; ch < nch; ++ch) {
    TerminalPair tp;
    tp.sample_rate = fs;
    tp.e1.assign(n, 0.0);
    tp.e2.assign(n, 0.0);
    if (n > 0) {
      const auto x = carrier(seed, ch, n, fs);
      Rng jitter(derive_seed(seed, "jitter", ch));
      for (std::size_t b = 0; b < protocol.gestures.size(); ++b) {
        const auto g = protocol.gestures[b];
        const auto& cell = tmpl.at(g, ch);
        for (std::size_t r = 0; r < reps; ++r) {
          const double j = std::max(0.0, 1.0 + cell.jitter * jitter.normal());
          const std::size_t start = (b * reps + r) * cycle_n;
          for (std::size_t i = 0; i < hold_n; ++i) {
            const double t = static_cast<double>(i) / fs;
            const double s = activation_envelope(g, ch, t, tmpl, protocol.hold) * j * x[start + i];
            tp.e1[start + i] = 0.5 * s;
            tp.e2[start + i] = -0.5 * s;
          }
        }
      }
    }
    add_interference(tp, noise, seed, ch);
    out.channels.push_back(std::move(tp));
  }
  return out;
}

ingest::Recording generate_session(const ProtocolSpec& protocol, const ActivationTemplate& tmpl,
                                   const InterferenceModel& noise, std::uint64_t seed,
                                   const SessionOptions& options) {
  auto terminals = generate_terminals(protocol, tmpl, noise, seed);
  ingest::Recording rec;
  rec.header.protocol = protocol;
  rec.header.subject_id = options.subject_id;
  rec.header.placement = options.placement;
  rec.header.seed = seed;
  rec.labels = std::move(terminals.labels);
  for (std::size_t ch = 0; ch < terminals.channels.size(); ++ch) {
    const auto& tp = terminals.channels[ch];
    std::vector<double> d;
    if (options.frontend != nullptr) {
      afe::SimulationOptions sim;
      sim.noise_seed = derive_seed(seed, "frontend-noise", ch);
      d = afe::apply_frontend(*options.frontend, tp, sim).differential();
    } else {
      d = tp.differential();
    }
    rec.channels.emplace_back(d.begin(), d.end());
  }
  return rec;
}

TerminalPair generate_tone(double freq, double amplitude, double duration, double fs,
                           ToneMode mode) {
  if (!(fs > 0.0)) throw DomainError("tone sample rate must be positive");
  if (!(duration > 0.0)) throw DomainError("tone duration must be positive");
  if (!(freq > 0.0)) throw DomainError("tone frequency must be positive");
  if (!(freq < fs / 2.0)) {
    throw DomainError("tone at " + std::to_string(freq) + " Hz aliases at fs " + std::to_string(fs) +
                      " Hz");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  TerminalPair tp;
  tp.sample_rate = fs;
  tp.e1.resize(n);
  tp.e2.resize(n);
  const double w = 2.0 * pi * freq / fs;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(w * static_cast<double>(i));
    if (mode == ToneMode::Differential) {
      tp.e1[i] = 0.5 * amplitude * s;
      tp.e2[i] = -0.5 * amplitude * s;
    } else {
      tp.e1[i] = amplitude * s;
      tp.e2[i] = amplitude * s;
    }
  }
  return tp;
}

std::vector<ingest::Recording> generate_corpus(const CorpusSpec& spec) {
  if (spec.subjects < 1) throw DomainError("corpus needs at least one subject");
  std::vector<ingest::Recording> out;
  for (int s = 0; s < spec.subjects; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    SessionOptions opts;
    opts.subject_id = std::string(1, static_cast<char>('A' + s % 26));
    if (s >= 26) opts.subject_id += std::to_string(s / 26);
    out.push_back(generate_session(spec.protocol, subject_template(idx, spec.seed), spec.noise,
                                   derive_seed(spec.seed, "session", idx), opts));
  }
  return out;
}

}  // namespace semg::synth
