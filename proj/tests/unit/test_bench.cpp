#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semg/afe.hpp"
#include "semg/bench_report.hpp"
#include "semg/cmrr_bench.hpp"
#include "semg/errors.hpp"
#include "semg/psd.hpp"
#include "semg/rng.hpp"
#include "support.hpp"

using namespace semg;
using namespace semg::bench;

namespace {

struct ScaledDut : DeviceUnderTest {
  double diff_gain = 1.0;
  double cm_gain = 1.0;
  std::vector<double> respond(const ToneRequest& r) const override {
    const double g = r.mode == synth::ToneMode::Differential ? diff_gain : cm_gain;
    const auto n = static_cast<std::size_t>(std::llround(r.duration * r.sample_rate));
    return testing::sine(r.freq, g * r.amplitude, n, r.sample_rate, 0.3);
  }
  std::string describe() const override { return "scaled tones"; }
};

struct FailingDut : DeviceUnderTest {
  std::vector<double> respond(const ToneRequest& r) const override {
    if (r.freq > 100.0) throw std::runtime_error("device fault");
    const auto n = static_cast<std::size_t>(std::llround(r.duration * r.sample_rate));
    return testing::sine(r.freq, r.mode == synth::ToneMode::Differential ? 1.0 : 1e-3, n, r.sample_rate);
  }
  std::string describe() const override { return "failing"; }
};

CmrrPoint pt(double f, double db, PointFlag flag = PointFlag::None) {
  CmrrPoint p;
  p.freq = f;
  p.cmrr_db = db;
  p.flag = flag;
  return p;
}

BenchConfig small_config(std::vector<double> freqs) {
  BenchConfig cfg;
  cfg.freqs = std::move(freqs);
  return cfg;
}

}  // namespace

TEST_CASE("psd of silence is zero and grid spans 0..fs/2") {
  const std::vector<double> zero(4000, 0.0);
  const auto psd = estimate_psd(zero, 1000.0);
  CHECK(std::all_of(psd.density.begin(), psd.density.end(), [](double d) { return d == 0.0; }));
  CHECK(psd.freqs.front() == 0.0);
  CHECK(psd.freqs.back() == doctest::Approx(500.0));
  CHECK(psd.bin_width() == doctest::Approx(0.5));
  CHECK_THROWS_AS(estimate_psd(std::vector<double>(100, 1.0), 1000.0), DomainError);
}

TEST_CASE("bin-centred sine integrates to a^2/2") {
  for (auto w : {Window::Hann, Window::Rectangular}) {
    PsdParams p;
    p.window = w;
    for (double a : {1.0, 3e-3}) {
      const auto x = testing::sine(37.5, a, 20000, 1000.0);
      const auto psd = estimate_psd(x, 1000.0, p);
      CHECK(psd.integrated_power() == doctest::Approx(0.5 * a * a).epsilon(0.01));
      CHECK(std::all_of(psd.density.begin(), psd.density.end(), [](double d) { return d >= 0.0; }));
    }
  }
}

TEST_CASE("Parseval for deterministic signals") {
  const double fs = 2000.0;
  std::vector<double> x(40000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    x[i] = 0.7 * std::sin(2 * 3.14159265358979 * 13.3 * t) + 0.2 * std::cos(2 * 3.14159265358979 * 211.7 * t + 1.0) +
           0.05 * std::sin(2 * 3.14159265358979 * (20.0 + 15.0 * t) * t);
  }
  const auto psd = estimate_psd(x, fs);
  CHECK(psd.integrated_power() == doctest::Approx(testing::mean_square(x)).epsilon(0.01));
}

TEST_CASE("white noise integrates to its variance") {
  Rng rng(derive_seed(9, "white"));
  std::vector<double> x(40000);
  for (double& v : x) v = rng.normal(0.0, 0.3);
  // sample variance as the oracle
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
  const auto psd = estimate_psd(x, 1000.0);
  CHECK(psd.integrated_power() == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("psd_at picks the local maximum") {
  PsdEstimate p;
  p.sample_rate = 10.0;
  p.segment_length = 10;
  p.freqs = {0, 1, 2, 3, 4, 5};
  p.density = {0.1, 0.2, 5.0, 0.4, 0.3, 0.1};
  CHECK(psd_at(p, 2.0, 0) == 5.0);
  CHECK(psd_at(p, 2.5, 1) == 5.0);  // half a bin off, neighbour wins
  CHECK(psd_at(p, 3.0, 0) == 0.4);
  CHECK(psd_at(p, 4.0, 1) == 0.4);
  CHECK_THROWS_AS(psd_at(p, 5.5, 1), DomainError);
  CHECK_THROWS_AS(psd_at(p, -1.0, 1), DomainError);
  p.density.assign(6, 0.25);
  for (std::size_t h = 0; h < 4; ++h) CHECK(psd_at(p, 3.0, h) == 0.25);
}

TEST_CASE("measure_cmrr arithmetic") {
  ScaledDut same;
  CHECK(measure_cmrr(same, 40.0, small_config({40.0})).cmrr_db == doctest::Approx(0.0).epsilon(1e-9));
  ScaledDut k1000;
  k1000.cm_gain = 1e-3;
  CHECK(measure_cmrr(k1000, 40.0, small_config({40.0})).cmrr_db == doctest::Approx(60.0).epsilon(1e-9));
  ScaledDut op;
  op.cm_gain = std::pow(10.0, -5.9 / 2);
  CHECK(measure_cmrr(op, 123.4, small_config({123.4})).cmrr_db == doctest::Approx(59.0).epsilon(1e-6));

  // recorded captures reproduce the same ratio
  RecordedDut rec;
  const auto cfg = small_config({40.0});
  const auto n = static_cast<std::size_t>((cfg.settle + cfg.tone_duration) * cfg.sample_rate);
  rec.add(40.0, synth::ToneMode::Differential, testing::sine(40.0, 1.0, n, cfg.sample_rate), cfg.sample_rate);
  rec.add(40.0, synth::ToneMode::CommonMode, testing::sine(40.0, 1e-3, n, cfg.sample_rate), cfg.sample_rate);
  CHECK(measure_cmrr(rec, 40.0, cfg).cmrr_db == doctest::Approx(60.0).epsilon(1e-9));
  CHECK_THROWS_AS(measure_cmrr(rec, 41.0, cfg), DomainError);
  CHECK_THROWS_AS(measure_cmrr(rec, 1000.0, cfg), DomainError);
}

TEST_CASE("matched model runs into the ceiling") {
  FrontEndDut dut(afe::FrontEndModel::ideal());
  const auto curve = sweep(dut, small_config({10.0, 50.0, 500.0}));
  for (const auto& p : curve.points) {
    CHECK(p.flag == PointFlag::Ceiling);
    CHECK(p.cmrr_db == 160.0);
  }
  CHECK_FALSE(curve.any_failure());
}

TEST_CASE("front-end sweep agrees with theory") {
  const auto model = afe::default_front_end();
  FrontEndDut dut(model);
  const auto curve = sweep(dut, small_config({10.0, 25.0, 60.0, 200.0, 500.0}));
  for (const auto& p : curve.points) {
    CAPTURE(p.freq);
    CHECK(std::abs(p.cmrr_db - afe::theoretical_cmrr(model, p.freq)) < 0.5);
  }
  CHECK(curve.points.front().cmrr_db < curve.points.back().cmrr_db);
}

TEST_CASE("tone amplitude cancels") {
  SensorChainDut dut(afe::default_front_end(), afe::AmplifierModel{});
  for (double f : {20.0, 150.0}) {
    auto cfg = small_config({f});
    const double ref = measure_cmrr(dut, f, cfg).cmrr_db;
    for (double k : {0.01, 7.0, 300.0}) {
      cfg.tone_amplitude = 10e-3 * k;
      CHECK(std::abs(measure_cmrr(dut, f, cfg).cmrr_db - ref) < 0.1);
    }
  }
}

TEST_CASE("longer tones reduce estimate variance") {
  afe::AmplifierModel amp;
  amp.noise_density = 2e-6;
  SensorChainDut dut(afe::default_front_end(), amp);
  std::vector<double> variances;
  for (double duration : {8.0, 32.0, 128.0}) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 12; ++s) {
      auto cfg = small_config({70.0});
      cfg.tone_duration = duration;
      cfg.seed = 1000 + s;
      v.push_back(measure_cmrr(dut, 70.0, cfg).cmrr_db);
    }
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - m) * (x - m);
    variances.push_back(var / static_cast<double>(v.size() - 1));
  }
  CAPTURE(variances[0]);
  CAPTURE(variances[2]);
  CHECK(variances[0] > variances[1]);
  CHECK(variances[1] > variances[2]);
}

TEST_CASE("sweep flags per point and keeps order") {
  auto cfg = small_config({600.0, 20.0, 200.0});
  cfg.sample_rate = 1000.0;
  FailingDut dut;
  const auto curve = sweep(dut, cfg);
  REQUIRE(curve.points.size() == 3u);
  CHECK(curve.points[0].freq == 20.0);
  CHECK(curve.points[0].flag == PointFlag::None);
  CHECK(curve.points[0].cmrr_db == doctest::Approx(60.0).epsilon(1e-6));
  CHECK(curve.points[1].flag == PointFlag::Error);
  CHECK(curve.points[1].note.find("device fault") != std::string::npos);
  CHECK(curve.points[2].flag == PointFlag::Nyquist);
  CHECK(curve.any_failure());
  CHECK(curve.mean_db() == doctest::Approx(60.0).epsilon(1e-6));

  cfg.parallel = false;
  const auto serial = sweep(dut, cfg);
  CHECK(serial.points[0].cmrr_db == curve.points[0].cmrr_db);
}

TEST_CASE("bench configuration limits") {
  BenchConfig cfg;
  cfg.tone_duration = 7.9;  // under four 2 s segments
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = BenchConfig{};
  cfg.freqs.clear();
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  const auto grid = default_frequency_grid();
  REQUIRE(grid.size() == 25u);
  CHECK(grid.front() == doctest::Approx(10.0));
  CHECK(grid.back() == doctest::Approx(500.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] / grid[i - 1] == doctest::Approx(std::pow(50.0, 1.0 / 24)));
}

TEST_CASE("comparison with theory on the default chain") {
  const auto model = afe::default_front_end();
  const afe::AmplifierModel amp;
  SensorChainDut dut(model, amp);
  const auto measured = sweep(dut, BenchConfig{});
  CHECK(measured.mean_db() == doctest::Approx(59.0).epsilon(3.0 / 59.0));
  const auto cmp = compare_to_theory(measured, model, amp);
  REQUIRE(cmp.rows.size() == 25u);
  for (const auto& row : cmp.rows) {
    CAPTURE(row.freq);
    CHECK(std::abs(row.delta) < 3.0);
    const double parts[] = {row.components.filter, row.components.gain_mismatch,
                            row.components.input_impedance, row.components.amplifier};
    CHECK(row.composite == doctest::Approx(afe::composite_cmrr(parts)));
    CHECK(row.composite <= *std::min_element(std::begin(parts), std::end(parts)) + 1e-12);
    if (row.freq <= 50.0) CHECK(row.limiting == Limiter::Filter);
    if (row.freq >= 100.0) CHECK(row.limiting == Limiter::Amplifier);
  }
}

TEST_CASE("curve comparison interpolates in log frequency") {
  CmrrCurve a, b;
  for (double f : {10.0, 100.0}) b.points.push_back(pt(f, f == 10.0 ? 40.0 : 60.0));
  a.points.push_back(pt(std::sqrt(1000.0), 55.0));
  a.points.push_back(pt(1000.0, 10.0));  // outside b, skipped
  const auto d = compare_curves(a, b);
  REQUIRE(d.size() == 1u);
  CHECK(d[0].delta == doctest::Approx(5.0));
  CmrrCurve far;
  far.points.push_back(pt(2000.0, 1.0));
  CHECK_THROWS_AS(compare_curves(far, b), DomainError);
}

TEST_CASE("calibration hits the target mean") {
  auto model = afe::default_front_end();
  model.filter.differential_resistance = 2e6;
  const afe::AmplifierModel amp;
  const auto grid = default_frequency_grid();
  const auto cal = calibrate_differential_resistance(model, amp, grid);
  CHECK(cal.mean_db == doctest::Approx(59.0).epsilon(1e-4));
  CHECK(cal.differential_resistance == doctest::Approx(afe::kCalibratedDifferentialResistance).epsilon(0.01));
  model.filter.differential_resistance = cal.differential_resistance;
  CHECK(chain_theory_curve(model, amp, grid).mean_db() == doctest::Approx(59.0).epsilon(1e-4));
}

TEST_CASE("report formats") {
  CmrrCurve c;
  c.points.push_back(pt(10.0, 50.0));
  c.points.push_back(pt(20.0, 160.0, PointFlag::Ceiling));
  const auto csv = curves_csv({c});
  CHECK(csv.rfind("freq_hz,cmrr_db,source,flag\n", 0) == 0);
  CHECK(csv.find("measured") != std::string::npos);
  CHECK(csv.find("ceiling") != std::string::npos);
  const auto svg = curves_svg({c}, {"measured"});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
