#include "semg/afe_io.hpp"

#include <cstdio>
#include <sstream>

#include "semg/errors.hpp"

namespace semg::afe {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void take_buffer(const KeyValueConfig& kv, const std::string& p, BufferStage& b) {
  kv.take(p + ".gain", b.gain);
  kv.take(p + ".input_resistance", b.input_resistance);
  kv.take(p + ".input_capacitance", b.input_capacitance);
  kv.take(p + ".bias_current", b.bias_current);
  kv.take(p + ".current_noise_density", b.current_noise_density);
}

void put_buffer(std::ostream& os, const std::string& p, const BufferStage& b) {
  os << p << ".gain = " << fmt(b.gain) << '\n'
     << p << ".input_resistance = " << fmt(b.input_resistance) << '\n'
     << p << ".input_capacitance = " << fmt(b.input_capacitance) << '\n'
     << p << ".bias_current = " << fmt(b.bias_current) << '\n'
     << p << ".current_noise_density = " << fmt(b.current_noise_density) << '\n';
}

}  // namespace

void apply_sensor_keys(const KeyValueConfig& kv, SensorConfig& cfg) {
  auto& m = cfg.frontend;
  if (kv.contains("gain_mismatch")) {
    double mismatch = 0.0;
    kv.take("gain_mismatch", mismatch);
    set_gain_mismatch(m, mismatch);
  }
  for (int i = 0; i < 2; ++i) {
    const std::string p = "electrode" + std::to_string(i + 1);
    kv.take(p + ".r_series", m.electrodes[i].r_series);
    kv.take(p + ".c_parallel", m.electrodes[i].c_parallel);
  }
  take_buffer(kv, "q1", m.input_buffers[0]);
  take_buffer(kv, "q2", m.input_buffers[1]);
  take_buffer(kv, "q3", m.output_buffers[0]);
  take_buffer(kv, "q4", m.output_buffers[1]);
  kv.take("tvs.line_capacitance", m.tvs.line_capacitance);
  kv.take("filter.cutoff", m.filter.cutoff);
  kv.take("filter.bias_resistance", m.filter.bias_resistance);
  kv.take("filter.differential_resistance", m.filter.differential_resistance);
  kv.take("filter.tolerance", m.filter.component_tolerance);
  if (auto mode = kv.take_string("filter.tolerance_mode")) {
    m.filter.mode = parse_tolerance_mode(*mode);
  }
  kv.take("filter.tolerance_seed", m.filter.tolerance_seed);
  kv.take("cmrr_ceiling_db", m.cmrr_ceiling_db);
  kv.take("amplifier.floor_db", cfg.amplifier.floor_db);
  kv.take("amplifier.corner_hz", cfg.amplifier.corner_hz);
  kv.take("amplifier.noise_density", cfg.amplifier.noise_density);
  try {
    m.validate();
    cfg.amplifier.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("sensor settings: ") + e.what());
  }
}

SensorConfig load_sensor_config(const std::filesystem::path& path) {
  const auto kv = KeyValueConfig::load(path);
  SensorConfig cfg;
  apply_sensor_keys(kv, cfg);
  kv.reject_unused(path.string());
  return cfg;
}

std::string render_sensor_config(const SensorConfig& cfg) {
  const auto& m = cfg.frontend;
  std::ostringstream os;
  for (int i = 0; i < 2; ++i) {
    const std::string p = "electrode" + std::to_string(i + 1);
    os << p << ".r_series = " << fmt(m.electrodes[i].r_series) << '\n'
       << p << ".c_parallel = " << fmt(m.electrodes[i].c_parallel) << '\n';
  }
  put_buffer(os, "q1", m.input_buffers[0]);
  put_buffer(os, "q2", m.input_buffers[1]);
  put_buffer(os, "q3", m.output_buffers[0]);
  put_buffer(os, "q4", m.output_buffers[1]);
  os << "tvs.line_capacitance = " << fmt(m.tvs.line_capacitance) << '\n'
     << "filter.cutoff = " << fmt(m.filter.cutoff) << '\n'
     << "filter.bias_resistance = " << fmt(m.filter.bias_resistance) << '\n'
     << "filter.differential_resistance = " << fmt(m.filter.differential_resistance) << '\n'
     << "filter.tolerance = " << fmt(m.filter.component_tolerance) << '\n'
     << "filter.tolerance_mode = " << to_string(m.filter.mode) << '\n'
     << "filter.tolerance_seed = " << m.filter.tolerance_seed << '\n'
     << "cmrr_ceiling_db = " << fmt(m.cmrr_ceiling_db) << '\n'
     << "amplifier.floor_db = " << fmt(cfg.amplifier.floor_db) << '\n'
     << "amplifier.corner_hz = " << fmt(cfg.amplifier.corner_hz) << '\n'
     << "amplifier.noise_density = " << fmt(cfg.amplifier.noise_density) << '\n';
  return os.str();
}

}  // namespace semg::afe
