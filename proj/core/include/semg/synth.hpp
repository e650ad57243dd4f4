#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semg/gesture.hpp"
#include "semg/protocol.hpp"
#include "semg/recording.hpp"

namespace semg::afe {
struct FrontEndModel;
}

namespace semg::synth {

/// Trapezoidal activation of one (gesture, channel) pair.
struct ActivationCell {
  double plateau = 0.0;  // V at the skin
  double rise = 0.5;     // s
  double fall = 0.5;     // s
  double jitter = 0.1;   // per-repetition amplitude spread, fraction of plateau
};

class ActivationTemplate {
 public:
  explicit ActivationTemplate(std::size_t channels = 4);

  std::size_t channels() const { return channels_; }

  /// Throws DomainError when `channel` is out of range.
  ActivationCell& at(GestureLabel g, std::size_t channel);
  const ActivationCell& at(GestureLabel g, std::size_t channel) const;

  /// Neutral must stay silent and every ramp must fit inside `hold`.
  void validate(double hold) const;

  /// Multiplies every plateau of `g` by `factor`.
  void scale(GestureLabel g, double factor);

 private:
  std::size_t channels_;
  std::array<std::vector<ActivationCell>, kGestureCount> cells_;
};

/// Four-channel reference activation patterns with distinct dominant channels.
ActivationTemplate default_template();

/// Reference patterns perturbed per virtual subject (deterministic in seed).
ActivationTemplate subject_template(std::size_t subject_index, std::uint64_t seed);

/// Interference superimposed on the electrode terminals.
struct InterferenceModel {
  double powerline_freq = 50.0;                 // Hz
  double powerline_common_mode_amplitude = 5e-3;  // V, identical on both terminals
  double white_noise_density = 2e-6;            // V/sqrt(Hz), independent per terminal
  double baseline_wander_amplitude = 20e-6;     // V rms
  double baseline_wander_corner = 0.5;          // Hz
  double motion_burst_rate = 0.05;              // bursts per second
  double motion_amplitude = 200e-6;             // V peak, e1 only
  double motion_duration = 0.5;                 // s

  static InterferenceModel none();
  void validate() const;
};

/// Electrode voltages of one bipolar sensor.
struct TerminalPair {
  std::vector<double> e1;
  std::vector<double> e2;
  double sample_rate = 0.0;

  std::size_t size() const { return e1.size(); }
  std::vector<double> differential() const;
  /// Equal lengths, finite samples, positive rate.
  void validate() const;
};

enum class ToneMode { Differential, CommonMode };

/// Trapezoid value at time `t` (seconds from hold onset).
double activation_envelope(GestureLabel gesture, std::size_t channel, double t,
                           const ActivationTemplate& tmpl, double hold);

/// Electrode-level output of a session, before any front end.
struct SessionTerminals {
  std::vector<TerminalPair> channels;
  std::vector<GestureLabel> labels;
};

SessionTerminals generate_terminals(const ProtocolSpec& protocol, const ActivationTemplate& tmpl,
                                    const InterferenceModel& noise, std::uint64_t seed);

struct SessionOptions {
  std::string subject_id = "A";
  std::string placement = "forearm, 4 bipolar sensors";
  /// When set, each channel goes through the sensor model and the recording
  /// holds Out1 - Out2; otherwise it holds the ideal difference e1 - e2.
  const afe::FrontEndModel* frontend = nullptr;
};

ingest::Recording generate_session(const ProtocolSpec& protocol, const ActivationTemplate& tmpl,
                                   const InterferenceModel& noise, std::uint64_t seed,
                                   const SessionOptions& options = {});

/// e1/e2 drive for a sine of frequency `freq`. Differential splits the
/// amplitude +a/2 / -a/2; CommonMode puts a on both terminals.
TerminalPair generate_tone(double freq, double amplitude, double duration, double fs,
                           ToneMode mode);

struct CorpusSpec {
  int subjects = 4;
  std::uint64_t seed = kDefaultSeed;
  ProtocolSpec protocol;
  InterferenceModel noise;
};

/// One recording per virtual subject, subject ids "A", "B", ...
std::vector<ingest::Recording> generate_corpus(const CorpusSpec& spec);

}  // namespace semg::synth
