#pragma once

#include <filesystem>
#include <string>

#include "semg/afe.hpp"
#include "semg/keyvalue.hpp"

namespace semg::afe {

/// Sensor plus the amplifier it is characterized with.
struct SensorConfig {
  FrontEndModel frontend = default_front_end();
  AmplifierModel amplifier{};
};

// Keys (SI units):
//   electrode1.r_series, electrode1.c_parallel, electrode2.*
//   q1.gain, q1.input_resistance, q1.input_capacitance, q1.bias_current,
//   q1.current_noise_density, and likewise q2 (input side 2), q3, q4 (outputs)
//   tvs.line_capacitance
//   filter.cutoff, filter.bias_resistance, filter.differential_resistance,
//   filter.tolerance, filter.tolerance_mode, filter.tolerance_seed
//   gain_mismatch (shortcut that rewrites all four buffer gains)
//   cmrr_ceiling_db
//   amplifier.floor_db, amplifier.corner_hz, amplifier.noise_density

/// Overwrites fields of `cfg` for every recognised key in `kv`. Keys are marked
/// used so the caller can reject leftovers. Validates the result.
void apply_sensor_keys(const KeyValueConfig& kv, SensorConfig& cfg);

/// Loads a model file; unknown keys raise ConfigError naming the key.
SensorConfig load_sensor_config(const std::filesystem::path& path);

/// Renders every key so that load(render(c)) reproduces c.
std::string render_sensor_config(const SensorConfig& cfg);

}  // namespace semg::afe
