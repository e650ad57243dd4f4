#include "semg/dsp/biquad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semg/errors.hpp"

namespace semg::dsp {
namespace {

using std::numbers::pi;

void check_design(int order, double cutoff_hz, double fs_hz) {
  if (order < 1) throw DomainError("filter order must be >= 1");
  if (!(fs_hz > 0.0)) throw DomainError("sample rate must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs_hz / 2.0)) {
    throw DomainError("cutoff must lie in (0, fs/2)");
  }
}

// Bilinear map of an analog biquad (b2 s^2 + b1 s + b0) / (a2 s^2 + a1 s + a0).
Biquad bilinear(double b2, double b1, double b0, double a2, double a1, double a0, double fs) {
  const double k = 2.0 * fs;
  if (a2 == 0.0 && b2 == 0.0) {
    // First order: keep it first order instead of adding a pole-zero pair at z = -1.
    const double A0 = a1 * k + a0;
    Biquad q;
    q.b0 = (b1 * k + b0) / A0;
    q.b1 = (b0 - b1 * k) / A0;
    q.a1 = (a0 - a1 * k) / A0;
    return q;
  }
  const double k2 = k * k;
  const double A0 = a2 * k2 + a1 * k + a0;
  Biquad q;
  q.b0 = (b2 * k2 + b1 * k + b0) / A0;
  q.b1 = (2.0 * b0 - 2.0 * b2 * k2) / A0;
  q.b2 = (b2 * k2 - b1 * k + b0) / A0;
  q.a1 = (2.0 * a0 - 2.0 * a2 * k2) / A0;
  q.a2 = (a2 * k2 - a1 * k + a0) / A0;
  return q;
}

enum class Kind { Lowpass, Highpass };

Sos butterworth(Kind kind, int order, double cutoff_hz, double fs_hz) {
  check_design(order, cutoff_hz, fs_hz);
  const double wc = 2.0 * fs_hz * std::tan(pi * cutoff_hz / fs_hz);
  Sos sos;
  for (int k = 0; k < order / 2; ++k) {
    // Conjugate pole pair of the normalized prototype: s^2 + 2 zeta s + 1.
    const double theta = pi * (2.0 * k + 1.0) / (2.0 * order);
    const double two_zeta = 2.0 * std::sin(theta);
    if (kind == Kind::Lowpass) {
      sos.push_back(bilinear(0.0, 0.0, wc * wc, 1.0, two_zeta * wc, wc * wc, fs_hz));
    } else {
      sos.push_back(bilinear(1.0, 0.0, 0.0, 1.0, two_zeta * wc, wc * wc, fs_hz));
    }
  }
  if (order % 2 == 1) {
    if (kind == Kind::Lowpass) {
      sos.push_back(bilinear(0.0, 0.0, wc, 0.0, 1.0, wc, fs_hz));
    } else {
      sos.push_back(bilinear(0.0, 1.0, 0.0, 0.0, 1.0, wc, fs_hz));
    }
  }
  return sos;
}

}  // namespace

std::complex<double> Biquad::response(double freq_hz, double fs_hz) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * pi * freq_hz / fs_hz);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

std::complex<double> response(const Sos& sos, double freq_hz, double fs_hz) {
  std::complex<double> h = 1.0;
  for (const auto& s : sos) h *= s.response(freq_hz, fs_hz);
  return h;
}

Sos butterworth_lowpass(int order, double cutoff_hz, double fs_hz) {
  return butterworth(Kind::Lowpass, order, cutoff_hz, fs_hz);
}

Sos butterworth_highpass(int order, double cutoff_hz, double fs_hz) {
  return butterworth(Kind::Highpass, order, cutoff_hz, fs_hz);
}

Sos notch_filter(double center_hz, double q, double fs_hz) {
  if (!(fs_hz > 0.0)) throw DomainError("sample rate must be positive");
  if (!(center_hz > 0.0) || !(center_hz < fs_hz / 2.0)) {
    throw DomainError("notch center must lie in (0, fs/2)");
  }
  if (!(q > 0.0)) throw DomainError("notch quality factor must be positive");
  const double w0 = 2.0 * pi * center_hz / fs_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(w0) / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * std::cos(w0) / a0;
  s.a2 = (1.0 - alpha) / a0;
  return {s};
}

SosFilter::SosFilter(Sos sos)
    : sos_(std::move(sos)), z1_(sos_.size(), 0.0), z2_(sos_.size(), 0.0) {}

double SosFilter::process(double x) {
  for (std::size_t i = 0; i < sos_.size(); ++i) {
    const auto& s = sos_[i];
    const double y = s.b0 * x + z1_[i];
    z1_[i] = s.b1 * x - s.a1 * y + z2_[i];
    z2_[i] = s.b2 * x - s.a2 * y;
    x = y;
  }
  return x;
}

void SosFilter::process(std::span<double> data) {
  for (auto& v : data) v = process(v);
}

void SosFilter::reset() {
  std::fill(z1_.begin(), z1_.end(), 0.0);
  std::fill(z2_.begin(), z2_.end(), 0.0);
}

void SosFilter::settle(double x) {
  for (std::size_t i = 0; i < sos_.size(); ++i) {
    const auto& s = sos_[i];
    const double y = s.dc_gain() * x;
    z2_[i] = s.b2 * x - s.a2 * y;
    z1_[i] = s.b1 * x - s.a1 * y + z2_[i];
    x = y;
  }
}

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x) {
  SosFilter f(sos);
  std::vector<double> y(x.begin(), x.end());
  f.process(y);
  return y;
}

std::vector<double> sosfiltfilt(const Sos& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = std::min<std::size_t>(3 * (2 * sos.size() + 1), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  SosFilter f(sos);
  f.settle(ext.front());
  f.process(ext);
  std::reverse(ext.begin(), ext.end());
  f.reset();
  f.settle(ext.front());
  f.process(ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace semg::dsp
