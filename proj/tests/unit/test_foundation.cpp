#include <doctest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "semg/afe_io.hpp"
#include "semg/dsp/biquad.hpp"
#include "semg/errors.hpp"
#include "semg/gesture.hpp"
#include "semg/keyvalue.hpp"
#include "semg/rng.hpp"
#include "support.hpp"

using namespace semg;
constexpr double kPi = std::numbers::pi;

TEST_CASE("rng streams") {
  Rng a(5), b(5), c(6);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform() != c.uniform());
  CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(derive_seed(1, "x") == derive_seed(1, "x"));

  Rng n(7);
  double s = 0, ss = 0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double v = n.normal();
    s += v;
    ss += v * v;
  }
  CHECK(std::abs(s / count) < 0.01);
  CHECK(ss / count == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("key = value parsing") {
  const auto kv = KeyValueConfig::parse("# comment\n a = 1.5 \n\nname = left arm\r\ncount=7\n");
  double a = 0;
  int count = 0;
  std::string name;
  kv.take("a", a);
  kv.take("count", count);
  kv.take("name", name);
  CHECK(a == 1.5);
  CHECK(count == 7);
  CHECK(name == "left arm");
  CHECK_NOTHROW(kv.reject_unused("test"));

  CHECK_THROWS_AS(KeyValueConfig::parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse(" = 3\n"), ConfigError);

  const auto bad = KeyValueConfig::parse("x = 1e3z\ny = 2.5\n");
  double x = 0;
  CHECK_THROWS_AS(bad.take("x", x), ConfigError);
  int y = 0;
  CHECK_THROWS_AS(bad.take("y", y), ConfigError);

  KeyValueConfig extra;
  extra.set_from_assignment("filter.cutoff=12");
  extra.set_from_assignment("mystery = 1");
  double cutoff = 0;
  extra.take("filter.cutoff", cutoff);
  CHECK(cutoff == 12.0);
  try {
    extra.reject_unused("overrides");
    FAIL("unused key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mystery") != std::string::npos);
  }
  CHECK_THROWS_AS(extra.set_from_assignment("noequals"), ConfigError);
}

TEST_CASE("gesture names") {
  CHECK(parse_gesture("hand") == GestureLabel::HandClosure);
  CHECK(parse_gesture("Thumb") == GestureLabel::Thumb);
  CHECK(parse_gesture("hand_closure") == GestureLabel::HandClosure);
  CHECK_FALSE(parse_gesture("pinky").has_value());
  CHECK(parse_gesture_list("thumb, ring") == std::vector{GestureLabel::Thumb, GestureLabel::Ring});
  CHECK_THROWS_AS(parse_gesture_list("thumb,pinky"), DomainError);
  CHECK(table_caption(GestureLabel::HandClosure) == "Hand");
  CHECK_FALSE(gesture_from_code(6).has_value());
  CHECK(gesture_from_code(0) == GestureLabel::Neutral);
}

TEST_CASE("sensor config files round-trip") {
  afe::SensorConfig cfg;
  cfg.frontend.electrodes[1].r_series = 2.2e6;
  cfg.frontend.filter.mode = afe::ToleranceMode::Seeded;
  cfg.frontend.filter.tolerance_seed = 77;
  cfg.frontend.output_buffers[1].gain = 0.9995;
  cfg.amplifier.floor_db = 72.5;
  const auto dir = testing::scratch_dir("sensor");
  const auto path = dir / "model.cfg";
  std::ofstream(path) << afe::render_sensor_config(cfg);
  const auto back = afe::load_sensor_config(path);
  CHECK(afe::render_sensor_config(back) == afe::render_sensor_config(cfg));
  CHECK(afe::theoretical_cmrr(back.frontend, 33.0) == afe::theoretical_cmrr(cfg.frontend, 33.0));

  std::ofstream(dir / "typo.cfg") << "filter.cuttoff = 12\n";
  try {
    afe::load_sensor_config(dir / "typo.cfg");
    FAIL("typo accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("filter.cuttoff") != std::string::npos);
  }
  std::ofstream(dir / "range.cfg") << "q1.gain = 1.5\n";
  CHECK_THROWS_AS(afe::load_sensor_config(dir / "range.cfg"), ConfigError);

  const auto kv = KeyValueConfig::parse("gain_mismatch = 0.002\n");
  afe::SensorConfig m;
  afe::apply_sensor_keys(kv, m);
  const auto& f = m.frontend;
  const double g1 = f.input_buffers[0].gain * f.output_buffers[0].gain;
  const double g2 = f.input_buffers[1].gain * f.output_buffers[1].gain;
  CHECK(g1 - g2 == doctest::Approx(0.002).epsilon(1e-3));
  std::filesystem::remove_all(dir);
}

TEST_CASE("butterworth designs") {
  const double fs = 250.0;
  for (int order : {1, 2, 4, 6}) {
    const auto lp = dsp::butterworth_lowpass(order, 20.0, fs);
    const auto hp = dsp::butterworth_highpass(order, 20.0, fs);
    CHECK(std::abs(dsp::response(lp, 20.0, fs)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(std::abs(dsp::response(hp, 20.0, fs)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(std::abs(dsp::response(lp, 0.0, fs)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dsp::response(hp, fs / 2, fs)) == doctest::Approx(1.0).epsilon(1e-9));
    // analog prototype on the prewarped axis: |H|^2 = 1 / (1 + (W/Wc)^(2n))
    const double f = 45.0;
    const double ratio = std::tan(kPi * f / fs) / std::tan(kPi * 20.0 / fs);
    CHECK(std::abs(dsp::response(lp, f, fs)) ==
          doctest::Approx(1 / std::sqrt(1 + std::pow(ratio, 2 * order))).epsilon(1e-9));
  }
  CHECK_THROWS_AS(dsp::butterworth_lowpass(2, 130.0, fs), DomainError);
  CHECK_THROWS_AS(dsp::butterworth_lowpass(0, 10.0, fs), DomainError);
}

TEST_CASE("notch and filtering helpers") {
  const double fs = 250.0;
  const auto n = dsp::notch_filter(50.0, 30.0, fs);
  CHECK(std::abs(dsp::response(n, 50.0, fs)) < 1e-9);
  CHECK(std::abs(dsp::response(n, 0.0, fs)) == doctest::Approx(1.0));

  // causal filtering steady state matches the complex response
  const auto lp = dsp::butterworth_lowpass(2, 10.0, fs);
  const auto x = testing::sine(5.0, 1.0, 5000, fs);
  const auto y = dsp::sosfilt(lp, x);
  CHECK(testing::tone_amplitude(y, 5.0, fs, 1000) == doctest::Approx(std::abs(dsp::response(lp, 5.0, fs))).epsilon(1e-6));

  // forward-backward squares the magnitude and removes the phase
  const auto z = dsp::sosfiltfilt(lp, x);
  const double mag = std::abs(dsp::response(lp, 5.0, fs));
  CHECK(testing::tone_amplitude(z, 5.0, fs, 1000) == doctest::Approx(mag * mag).epsilon(1e-4));
  double worst = 0.0;
  for (std::size_t i = 1000; i < 4000; ++i) worst = std::max(worst, std::abs(z[i] - mag * mag * x[i]));
  CHECK(worst < 1e-3);

  dsp::SosFilter f(lp);
  f.settle(2.0);
  CHECK(f.process(2.0) == doctest::Approx(2.0).epsilon(1e-12));
  f.reset();
  CHECK(f.process(0.0) == 0.0);
}
