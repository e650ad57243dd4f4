#pragma once

#include <complex>
#include <span>
#include <vector>

namespace semg::dsp {

/// Normalized second-order section (a0 == 1), transposed direct form II.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double freq_hz, double fs_hz) const;
  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

/// Cascade of second-order sections.
using Sos = std::vector<Biquad>;

std::complex<double> response(const Sos& sos, double freq_hz, double fs_hz);

/// Butterworth designs via the bilinear transform, prewarped at the cutoff.
Sos butterworth_lowpass(int order, double cutoff_hz, double fs_hz);
Sos butterworth_highpass(int order, double cutoff_hz, double fs_hz);

/// Second-order notch (RBJ cookbook form); bandwidth = center / q.
Sos notch_filter(double center_hz, double q, double fs_hz);

/// Stateful causal filter, one sample at a time.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(Sos sos);

  double process(double x);
  void process(std::span<double> data);
  void reset();
  /// Puts every section into the steady state for a constant input `x`.
  void settle(double x);

  const Sos& sections() const { return sos_; }

 private:
  Sos sos_;
  std::vector<double> z1_, z2_;
};

/// Causal filtering from a zero initial state.
std::vector<double> sosfilt(const Sos& sos, std::span<const double> x);

/// Zero-phase forward-backward filtering with odd-reflection padding and
/// steady-state initial conditions at both ends.
std::vector<double> sosfiltfilt(const Sos& sos, std::span<const double> x);

}  // namespace semg::dsp
