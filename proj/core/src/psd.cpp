#include "semg/psd.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "semg/errors.hpp"

namespace semg::bench {
namespace {

// The FFTW planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    if (!in_ || !out_) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  void execute() { fftw_execute(plan_); }
  double power(std::size_t k) const { return out_.get()[k][0] * out_.get()[k][0] + out_.get()[k][1] * out_.get()[k][1]; }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace

std::string_view to_string(Window w) noexcept {
  return w == Window::Hann ? "hann" : "rectangular";
}

void PsdParams::validate() const {
  if (!(segment_seconds > 0.0)) throw DomainError("psd segment length must be positive");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("psd overlap must lie in [0, 1)");
}

double PsdEstimate::integrated_power() const {
  double sum = 0.0;
  for (double d : density) sum += d;
  return sum * bin_width();
}

PsdEstimate estimate_psd(std::span<const double> signal, double fs, const PsdParams& params) {
  params.validate();
  if (!(fs > 0.0)) throw DomainError("psd sample rate must be positive");
  const auto len = static_cast<std::size_t>(std::llround(params.segment_seconds * fs));
  if (len < 2) throw DomainError("psd segment shorter than two samples");
  if (signal.size() < len) {
    throw DomainError("signal of " + std::to_string(signal.size()) + " samples is shorter than one " +
                      std::to_string(len) + "-sample segment");
  }
  const std::size_t step =
      std::max<std::size_t>(1, len - static_cast<std::size_t>(std::llround(params.overlap * static_cast<double>(len))));

  std::vector<double> w(len, 1.0);
  if (params.window == Window::Hann) {
    for (std::size_t i = 0; i < len; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
    }
  }
  double wss = 0.0;
  for (double v : w) wss += v * v;

  const std::size_t bins = len / 2 + 1;
  PsdEstimate est;
  est.params = params;
  est.sample_rate = fs;
  est.segment_length = len;
  est.freqs.resize(bins);
  est.density.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) est.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(len);

  RealFft fft(len);
  for (std::size_t start = 0; start + len <= signal.size(); start += step) {
    double* in = fft.input();
    for (std::size_t i = 0; i < len; ++i) in[i] = signal[start + i] * w[i];
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) est.density[k] += fft.power(k);
    ++est.segments;
  }

  const double scale = 1.0 / (fs * wss * static_cast<double>(est.segments));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (len % 2 == 0 && k == bins - 1);
    est.density[k] *= edge ? scale : 2.0 * scale;
  }
  return est;
}

double psd_at(const PsdEstimate& psd, double freq, std::size_t halfwidth) {
  if (psd.density.empty()) throw DomainError("empty psd");
  const double nyquist = psd.sample_rate / 2.0;
  if (!(freq >= 0.0 && freq <= nyquist)) {
    throw DomainError("frequency " + std::to_string(freq) + " Hz outside psd grid [0, " +
                      std::to_string(nyquist) + "]");
  }
  const auto bin = static_cast<std::size_t>(std::llround(freq / psd.bin_width()));
  const std::size_t last = psd.density.size() - 1;
  const std::size_t lo = bin > halfwidth ? bin - halfwidth : 0;
  const std::size_t hi = std::min(last, bin + halfwidth);
  return *std::max_element(psd.density.begin() + static_cast<std::ptrdiff_t>(lo),
                           psd.density.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
}

}  // namespace semg::bench
