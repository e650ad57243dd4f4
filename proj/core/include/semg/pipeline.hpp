#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "semg/dsp/biquad.hpp"

namespace semg::pipeline {

/// Zero-phase (forward-backward) for offline work, causal for streaming.
enum class Phase { ZeroPhase, Causal };

std::string_view to_string(Phase p) noexcept;

struct FilterSpec {
  double low = 15.0;    // Hz, band-pass lower edge
  double high = 120.0;  // Hz, band-pass upper edge
  int order = 4;        // Butterworth order of each edge
  bool notch_enabled = true;
  double notch_center = 50.0;  // Hz
  double notch_q = 30.0;

  /// 0 < low < high < fs/2; notch center inside the band unless disabled.
  void validate(double fs) const;
};

struct EnvelopeSpec {
  double cutoff = 3.0;  // Hz, low-pass applied after full-wave rectification
  int order = 2;

  void validate(double fs, const FilterSpec& filter) const;
};

dsp::Sos bandpass_sections(double fs, const FilterSpec& spec);
dsp::Sos notch_sections(double fs, double center, double q);
/// Band-pass followed by the notch when enabled.
dsp::Sos preprocess_sections(double fs, const FilterSpec& spec);
dsp::Sos envelope_sections(double fs, const EnvelopeSpec& spec);

std::vector<double> bandpass(std::span<const double> x, double fs, const FilterSpec& spec,
                             Phase phase = Phase::ZeroPhase);
std::vector<double> notch(std::span<const double> x, double fs, double center, double q,
                          Phase phase = Phase::ZeroPhase);
/// Rectify, then low-pass; the result is clamped at zero.
std::vector<double> envelope(std::span<const double> x, double fs, const EnvelopeSpec& spec,
                             Phase phase = Phase::ZeroPhase);

/// Band-pass, notch and envelope of every channel.
std::vector<std::vector<double>> channel_envelopes(const std::vector<std::vector<double>>& channels,
                                                   double fs, const FilterSpec& filter,
                                                   const EnvelopeSpec& env, Phase phase);

// ---------------------------------------------------------------------------
// onset detection

struct OnsetSpec {
  double k = 3.0;                   // threshold factor over the baseline
  double baseline_window = 2.0;     // s of trailing history for the median
  double refresh = 0.1;             // s between baseline updates
  double hysteresis = 5.0;          // s during which no new onset is reported
  double absolute_floor = 0.0;      // V, threshold never drops below this

  void validate() const;
};

/// Incremental detector on the max-across-channels envelope. The baseline is
/// the median of the trailing window; until the window has filled, an
/// optional initial baseline (for example from labeled rest) is used.
class OnsetDetector {
 public:
  OnsetDetector(const OnsetSpec& spec, double fs, std::optional<double> initial_baseline = {});

  /// Returns true when sample `value` starts a new activation.
  bool push(double value);
  std::size_t samples_seen() const { return n_; }
  std::optional<double> baseline() const { return baseline_; }

 private:
  void refresh_baseline();

  OnsetSpec spec_;
  std::size_t window_;
  std::size_t refresh_;
  std::size_t hysteresis_;
  std::optional<double> initial_;
  std::optional<double> baseline_;
  std::deque<double> history_;
  std::vector<double> scratch_;
  std::size_t n_ = 0;
  std::optional<std::size_t> last_onset_;
};

/// Onset sample indices over aligned per-channel envelopes.
std::vector<std::size_t> detect_onsets(const std::vector<std::vector<double>>& envelopes, double fs,
                                       const OnsetSpec& spec,
                                       std::optional<double> initial_baseline = {});

/// First onset in seconds, or none when the envelopes stay quiescent.
std::optional<double> detect_onset(const std::vector<std::vector<double>>& envelopes, double fs,
                                   const OnsetSpec& spec,
                                   std::optional<double> initial_baseline = {});

/// Median of the max-across-channels envelope over the selected samples.
double rest_baseline(const std::vector<std::vector<double>>& envelopes,
                     const std::vector<bool>& rest_mask);

// ---------------------------------------------------------------------------
// TMA maps

struct TmaMap {
  std::size_t channels = 0;
  std::size_t samples = 0;
  std::vector<double> values;  // row-major, channels x samples
  double start = 0.0;          // s
  double length = 0.0;         // s
  bool degenerate = false;     // window was all zero; values left at zero

  double at(std::size_t ch, std::size_t i) const { return values[ch * samples + i]; }
  double peak() const;
};

inline constexpr std::string_view kMapNormalization = "unit_peak";

/// Envelope window starting at sample `onset`, `window` seconds long,
/// normalized to unit peak. Throws DomainError when the window leaves the data.
TmaMap tma_map(const std::vector<std::vector<double>>& envelopes, std::size_t onset, double fs,
               double window);

}  // namespace semg::pipeline
