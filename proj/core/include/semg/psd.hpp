#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace semg::bench {

enum class Window { Hann, Rectangular };

std::string_view to_string(Window w) noexcept;

/// Welch estimator settings. The FFT length equals the segment length.
struct PsdParams {
  double segment_seconds = 2.0;
  double overlap = 0.5;  // fraction of a segment shared with the next
  Window window = Window::Hann;

  void validate() const;
};

/// One-sided density in V^2/Hz on the grid k * fs / segment_length.
struct PsdEstimate {
  std::vector<double> freqs;
  std::vector<double> density;
  PsdParams params;
  double sample_rate = 0.0;
  std::size_t segment_length = 0;
  std::size_t segments = 0;

  double bin_width() const { return sample_rate / static_cast<double>(segment_length); }
  /// Rectangle-rule integral of the density, i.e. the estimated mean square.
  double integrated_power() const;
};

/// Welch-averaged modified periodogram, scaled so that integrated_power()
/// recovers the mean square of the signal. Throws DomainError when the signal
/// is shorter than one segment.
PsdEstimate estimate_psd(std::span<const double> signal, double fs, const PsdParams& params = {});

/// Largest density within +-halfwidth bins of `freq`. Throws DomainError when
/// `freq` lies outside [0, fs/2].
double psd_at(const PsdEstimate& psd, double freq, std::size_t halfwidth);

}  // namespace semg::bench
