#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "semg/afe.hpp"
#include "semg/cmrr_bench.hpp"
#include "semg/errors.hpp"
#include "semg/rng.hpp"
#include "support.hpp"

using namespace semg;
using afe::FrontEndModel;
using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

// First-order high-pass magnitude, the closed form the filter reduces to
// when both sides match.
double hp1(double f, double fc) { return (f / fc) / std::sqrt(1.0 + (f / fc) * (f / fc)); }

FrontEndModel filter_only() {
  FrontEndModel m;  // worst-case tolerance, unity gains, matched inputs
  return m;
}

FrontEndModel low_source_impedance() {
  auto m = FrontEndModel::ideal();
  for (auto& e : m.electrodes) e.r_series = 1e3;
  return m;
}

double find_corner(const FrontEndModel& m) {
  const double pass = afe::differential_transfer(m, 5000.0).magnitude();
  double lo = 1.0, hi = 100.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    (afe::differential_transfer(m, mid).magnitude() < pass / std::sqrt(2.0) ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

synth::TerminalPair pair_from(std::vector<double> e1, std::vector<double> e2, double fs) {
  synth::TerminalPair p;
  p.e1 = std::move(e1);
  p.e2 = std::move(e2);
  p.sample_rate = fs;
  return p;
}

}  // namespace

TEST_CASE("ideal differential response") {
  const auto ideal = FrontEndModel::ideal();
  CHECK(afe::differential_transfer(ideal, 15.0).magnitude() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(afe::differential_transfer(ideal, 1.5).magnitude() == doctest::Approx(hp1(1.5, 15.0)).epsilon(1e-4));
  CHECK(afe::differential_transfer(ideal, 1.5).magnitude() == doctest::Approx(0.0995).epsilon(1e-3));
  CHECK(afe::differential_transfer(low_source_impedance(), 10e3).magnitude() == doctest::Approx(1.0).epsilon(1e-3));

  // with 1 Mohm electrodes the input node rolls off through Cin + Ctvs
  const double c_in = ideal.input_buffers[0].input_capacitance + ideal.tvs.line_capacitance;
  const double pole = 1.0 / std::abs(cplx(1.0, 2 * kPi * 10e3 * 1e6 * c_in));
  CHECK(afe::differential_transfer(ideal, 10e3).magnitude() ==
        doctest::Approx(pole * hp1(10e3, 15.0)).epsilon(1e-3));
}

TEST_CASE("default model corner and quasi-DC rejection") {
  const auto m = afe::default_front_end();
  CHECK(find_corner(m) == doctest::Approx(15.0).epsilon(0.5 / 15.0));
  const double pass = afe::differential_transfer(m, 5000.0).magnitude();
  CHECK(20 * std::log10(pass / afe::differential_transfer(m, 0.1).magnitude()) > 40.0);
}

TEST_CASE("matched model has exactly zero common-mode gain") {
  const auto m = FrontEndModel::ideal();
  for (double f : {1.0, 10.0, 50.0, 500.0, 5000.0}) {
    CHECK(afe::common_mode_transfer(m, f).magnitude() == 0.0);
    CHECK(afe::theoretical_cmrr(m, f) == m.cmrr_ceiling_db);
  }
}

TEST_CASE("buffer gain mismatch against the two-path closed form") {
  auto m = FrontEndModel::ideal();
  m.input_buffers[1].gain = 0.999;
  // (g1 v, g2 v) splits into a common part the matched filter rejects and a
  // difference (g1 - g2) v that it passes like any differential signal
  for (double f : {100.0, 300.0, 500.0}) {
    const double hc = afe::common_mode_transfer(m, f).magnitude();
    CHECK(hc == doctest::Approx(0.001 * hp1(f, 15.0)).epsilon(1e-4));
    const double closed = 20 * std::log10(((1.0 + 0.999) / 2) / 0.001);
    CHECK(afe::theoretical_cmrr(m, f) == doctest::Approx(closed).epsilon(1e-5));
    CHECK(afe::theoretical_cmrr(m, f) == doctest::Approx(60.0).epsilon(0.01));
  }
}

TEST_CASE("electrode mismatch alone cancels behind an unloaded input") {
  auto m = FrontEndModel::ideal();
  m.electrodes[0].r_series = 100e3;
  m.electrodes[1].r_series = 5e6;
  m.electrodes[1].c_parallel = 10e-9;
  for (auto& b : m.input_buffers) {
    b.input_resistance = 1e30;
    b.input_capacitance = 0.0;
  }
  m.tvs.line_capacitance = 0.0;
  for (double f : {10.0, 100.0, 500.0}) CHECK(afe::common_mode_transfer(m, f).magnitude() < 1e-15);

  // with the real 4.7 pF load the mismatch does leak
  auto loaded = FrontEndModel::ideal();
  loaded.electrodes = m.electrodes;
  CHECK(afe::common_mode_transfer(loaded, 100.0).magnitude() > 1e-6);
}

TEST_CASE("theoretical CMRR equals the ratio of the two transfers") {
  Rng rng(derive_seed(1, "afe-ratio"));
  for (int trial = 0; trial < 20; ++trial) {
    auto m = afe::default_front_end();
    m.filter.mode = afe::ToleranceMode::Seeded;
    m.filter.tolerance_seed = rng.next_u64();
    afe::set_gain_mismatch(m, rng.uniform(0.0, 0.004));
    m.electrodes[1].r_series = rng.uniform(100e3, 5e6);
    const double f = std::exp(rng.uniform(std::log(10.0), std::log(500.0)));
    const double hd = afe::differential_transfer(m, f).magnitude();
    const double hc = afe::common_mode_transfer(m, f).magnitude();
    CHECK(afe::theoretical_cmrr(m, f) == doctest::Approx(20 * std::log10(hd / hc)).epsilon(1e-12));
  }
}

TEST_CASE("filter-only CMRR rises with frequency") {
  const auto m = filter_only();
  double prev = -1e9;
  for (double f : bench::default_frequency_grid()) {
    const double v = afe::theoretical_cmrr(m, f);
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
  CHECK(afe::theoretical_cmrr(m, 10.0) < afe::theoretical_cmrr(m, 500.0));
}

TEST_CASE("composite CMRR") {
  const double one[] = {60.0};
  const double two[] = {60.0, 60.0};
  const double dom[] = {60.0, 100.0};
  CHECK(afe::composite_cmrr(one) == doctest::Approx(60.0));
  CHECK(afe::composite_cmrr(two) == doctest::Approx(-10 * std::log10(2e-6)));
  CHECK(afe::composite_cmrr(two) == doctest::Approx(56.99).epsilon(1e-4));
  CHECK(afe::composite_cmrr(dom) == doctest::Approx(59.99957).epsilon(1e-7));
  CHECK_THROWS_AS(afe::composite_cmrr(std::span<const double>{}), DomainError);

  Rng rng(derive_seed(2, "composite"));
  for (int i = 0; i < 500; ++i) {
    std::vector<double> parts(1 + rng.next_u64() % 6);
    for (double& p : parts) p = rng.uniform(-20.0, 160.0);
    CHECK(afe::composite_cmrr(parts) <= *std::min_element(parts.begin(), parts.end()) + 1e-12);
  }
}

TEST_CASE("bias current offsets") {
  auto m = FrontEndModel::ideal();
  const auto off = afe::static_offsets(m);
  // 2 pA through 1 Mohm, shunted by the 10 Tohm input
  CHECK(off.input[0] == doctest::Approx(2e-12 * 1e6).epsilon(1e-6));
  CHECK(off.input[1] == doctest::Approx(2e-6).epsilon(1e-6));
  // output buffer bias returns through R2 with Rd + R2 of the other side in parallel
  const double r2 = m.filter.bias_resistance;
  const double rd = m.filter.effective_differential_resistance();
  const double r_eq = 1.0 / (1.0 / r2 + 1.0 / (rd + r2));
  // both sides inject, so the far side adds its share through the divider
  const double v = 2e-12 * r_eq + 2e-12 * r_eq * (r2 / (rd + r2));
  CHECK(off.output[0] == doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("time domain: DC input settles to the bias offsets") {
  const auto m = afe::default_front_end();
  const double fs = 250.0;
  const std::size_t n = 2500;
  const auto out = afe::apply_frontend(m, pair_from(std::vector<double>(n, 10e-3), std::vector<double>(n, -3e-3), fs));
  const auto off = afe::static_offsets(m);
  CHECK(out.e1.back() == doctest::Approx(off.output[0]).epsilon(1e-3));
  CHECK(out.e2.back() == doctest::Approx(off.output[1]).epsilon(1e-3));
  CHECK(std::abs(out.e1[1]) > 1e-3);  // the step passes at first
}

TEST_CASE("time domain: matched model cancels a common-mode tone") {
  const auto m = FrontEndModel::ideal();
  const auto tone = synth::generate_tone(50.0, 10e-3, 4.0, 2000.0, synth::ToneMode::CommonMode);
  const auto out = afe::apply_frontend(m, tone);
  double worst = 0.0;
  for (double v : out.differential()) worst = std::max(worst, std::abs(v));
  CHECK(worst < 10e-3 * 1e-6);
}

TEST_CASE("time domain is linear without bias and noise") {
  const auto m = afe::default_front_end();
  const double fs = 500.0;
  Rng rng(derive_seed(3, "linearity"));
  std::vector<double> x1(3000), x2(3000), y1(3000), y2(3000);
  for (auto* v : {&x1, &x2, &y1, &y2}) {
    for (double& s : *v) s = rng.normal(0.0, 1e-3);
  }
  const double a = 2.5, b = -0.7;
  std::vector<double> z1(3000), z2(3000);
  for (std::size_t i = 0; i < 3000; ++i) {
    z1[i] = a * x1[i] + b * y1[i];
    z2[i] = a * x2[i] + b * y2[i];
  }
  afe::SimulationOptions opt;
  opt.include_bias = false;
  const auto fx = afe::apply_frontend(m, pair_from(x1, x2, fs), opt);
  const auto fy = afe::apply_frontend(m, pair_from(y1, y2, fs), opt);
  const auto fz = afe::apply_frontend(m, pair_from(z1, z2, fs), opt);
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < 3000; ++i) {
    scale = std::max(scale, std::abs(fz.e1[i]));
    err = std::max(err, std::abs(fz.e1[i] - (a * fx.e1[i] + b * fy.e1[i])));
    err = std::max(err, std::abs(fz.e2[i] - (a * fx.e2[i] + b * fy.e2[i])));
  }
  CHECK(err <= 1e-9 * scale);
}

TEST_CASE("time domain tone amplitude matches the transfer function") {
  const auto m = afe::default_front_end();
  for (double fs : {250.0, 2000.0}) {
    for (double f : {10.0, 15.0, 20.0, 40.0, 80.0, 110.0}) {
      if (f >= fs / 2) continue;
      const auto tone = synth::generate_tone(f, 2e-3, 12.0, fs, synth::ToneMode::Differential);
      afe::SimulationOptions opt;
      opt.include_bias = false;
      const auto out = afe::apply_frontend(m, tone, opt);
      const auto d = out.differential();
      const double got = testing::tone_amplitude(d, f, fs, static_cast<std::size_t>(2 * fs)) / 2e-3;
      CAPTURE(fs);
      CAPTURE(f);
      CHECK(got == doctest::Approx(afe::differential_transfer(m, f).magnitude()).epsilon(0.01));
    }
  }
}

TEST_CASE("state-space model agrees with the nodal solution") {
  auto m = afe::default_front_end();
  m.electrodes[1].r_series = 3e6;
  m.electrodes[0].c_parallel = 2e-9;
  for (double f : {0.5, 10.0, 50.0, 500.0, 5000.0}) {
    const cplx d = afe::state_space_response(m, f, 0.5, -0.5, 0) - afe::state_space_response(m, f, 0.5, -0.5, 1);
    const cplx c = afe::state_space_response(m, f, 1.0, 1.0, 0) - afe::state_space_response(m, f, 1.0, 1.0, 1);
    const cplx hd = afe::differential_transfer(m, f).gain;
    const cplx hc = afe::common_mode_transfer(m, f).gain;
    CHECK(std::abs(d - hd) <= 1e-9 * std::abs(hd));
    CHECK(std::abs(c - hc) <= 1e-7 * std::abs(hc));
  }
}

TEST_CASE("sample rate below four times the cutoff is rejected") {
  const auto tone = synth::generate_tone(5.0, 1e-3, 2.0, 50.0, synth::ToneMode::Differential);
  CHECK_THROWS_AS(afe::apply_frontend(afe::default_front_end(), tone), ConfigError);
}

TEST_CASE("buffer current noise is seeded") {
  const auto m = afe::default_front_end();
  const auto quiet = synth::generate_tone(30.0, 0.0, 2.0, 250.0, synth::ToneMode::Differential);
  afe::SimulationOptions opt;
  opt.include_bias = false;
  opt.synthesize_noise = true;
  const auto a = afe::apply_frontend(m, quiet, opt);
  const auto b = afe::apply_frontend(m, quiet, opt);
  opt.noise_seed = 99;
  const auto c = afe::apply_frontend(m, quiet, opt);
  CHECK(a.e1 == b.e1);
  CHECK(a.e1 != c.e1);
  CHECK(testing::rms(a.e1) > 0.0);
}

TEST_CASE("tolerance modes") {
  afe::DiffHighPass f;
  f.mode = afe::ToleranceMode::Ideal;
  auto r = f.realized();
  CHECK(r.capacitance[0] == r.capacitance[1]);
  f.mode = afe::ToleranceMode::WorstCase;
  r = f.realized();
  CHECK(r.capacitance[0] == doctest::Approx(f.nominal_capacitance() * 1.01));
  CHECK(r.capacitance[1] == doctest::Approx(f.nominal_capacitance() * 0.99));
  f.mode = afe::ToleranceMode::Seeded;
  r = f.realized();
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(r.capacitance[i] / f.nominal_capacitance() - 1.0) <= 0.01 + 1e-12);
    CHECK(std::abs(r.bias_resistance[i] / f.bias_resistance - 1.0) <= 0.01 + 1e-12);
  }
  CHECK(afe::parse_tolerance_mode("seeded") == afe::ToleranceMode::Seeded);
  CHECK_THROWS_AS(afe::parse_tolerance_mode("typical"), ConfigError);
}

TEST_CASE("model validation") {
  auto m = afe::default_front_end();
  m.electrodes[0].r_series = 0.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = afe::default_front_end();
  m.input_buffers[0].gain = 1.2;
  CHECK_THROWS_AS(m.validate(), DomainError);
  m = afe::default_front_end();
  m.tvs.line_capacitance = -1e-12;
  CHECK_THROWS_AS(m.validate(), DomainError);
}

TEST_CASE("amplifier floor") {
  afe::AmplifierModel amp;
  CHECK(amp.cmrr_at(10.0) == doctest::Approx(70.0 - 10 * std::log10(1.0 + 0.04)).epsilon(1e-9));
  CHECK(amp.cmrr_at(500.0) == doctest::Approx(70.0 - 10 * std::log10(1.0 + 100.0)).epsilon(1e-9));
}
