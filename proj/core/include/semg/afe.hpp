#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include "semg/protocol.hpp"
#include "semg/synth.hpp"

namespace semg::afe {

/// Dry electrode contact: series resistance shunted by a capacitance.
struct ElectrodeSkinInterface {
  double r_series = 1e6;    // ohm
  double c_parallel = 0.0;  // F

  void validate() const;
};

/// Unity-gain buffer (one of the four channels of the quad buffer).
struct BufferStage {
  double gain = 1.0;
  double input_resistance = 10e12;        // ohm
  double input_capacitance = 4e-12;       // F
  double bias_current = 2e-12;            // A
  double current_noise_density = 0.8e-15;  // A/sqrt(Hz)

  void validate() const;
};

/// Input protection; only its line capacitance is modeled.
struct TvsStage {
  double line_capacitance = 0.7e-12;  // F

  void validate() const;
};

enum class ToleranceMode {
  Ideal,      // both sides at nominal
  WorstCase,  // side 1 at +tol, side 2 at -tol for every component
  Seeded,     // independent uniform draws in [-tol, +tol]
};

std::string_view to_string(ToleranceMode m) noexcept;
ToleranceMode parse_tolerance_mode(std::string_view text);

/// Differential high-pass between the input and output buffers. Each line has
/// a series capacitor into a node biased to ground through R2; a shared
/// resistor Rd joins the two nodes. The differential corner is set by
/// C * (R2 || Rd/2), the common-mode corner by C * R2, so a large R2 keeps
/// common-mode leakage from component mismatch small.
struct DiffHighPass {
  double cutoff = 15.0;                   // Hz, differential -3 dB point
  double bias_resistance = 10e6;          // ohm (R2)
  double differential_resistance = 0.0;   // ohm (Rd); 0 selects the calibrated default
  double component_tolerance = 0.01;      // fraction
  ToleranceMode mode = ToleranceMode::WorstCase;
  std::uint64_t tolerance_seed = kDefaultSeed;

  struct Realized {
    std::array<double, 2> capacitance{};
    std::array<double, 2> bias_resistance{};
    double differential_resistance = 0.0;
  };

  double effective_differential_resistance() const;
  /// Capacitance placing the nominal differential corner at `cutoff`.
  double nominal_capacitance() const;
  Realized realized() const;
  void validate() const;
};

/// Calibrated default for DiffHighPass::differential_resistance; see
/// bench::calibrate_differential_resistance for how it was obtained.
inline constexpr double kCalibratedDifferentialResistance = 672.0e3;

/// Default mismatch between the two buffer paths (Q1*Q3 vs Q2*Q4).
inline constexpr double kDefaultGainMismatch = 1e-4;

/// One bipolar sensor: electrodes, input buffers Q1/Q2 with TVS loading, the
/// differential high-pass, output buffers Q3/Q4 driving Out1/Out2.
struct FrontEndModel {
  std::array<ElectrodeSkinInterface, 2> electrodes{};
  std::array<BufferStage, 2> input_buffers{};
  TvsStage tvs{};
  DiffHighPass filter{};
  std::array<BufferStage, 2> output_buffers{};
  double cmrr_ceiling_db = 160.0;

  void validate() const;

  /// Matched everywhere: exact nominal filter and unity gains.
  static FrontEndModel ideal();
};

/// Calibrated defaults (worst-case filter tolerance, kDefaultGainMismatch).
FrontEndModel default_front_end();

/// Splits `mismatch` evenly over the four buffers: Q1,Q3 at 1+m/4, Q2,Q4 at 1-m/4.
void set_gain_mismatch(FrontEndModel& model, double mismatch);

struct TransferResponse {
  double freq = 0.0;
  std::complex<double> gain;

  double magnitude() const { return std::abs(gain); }
  double phase() const { return std::arg(gain); }
};

/// (e1 - e2) -> (Out1 - Out2) by nodal analysis of the realized network.
TransferResponse differential_transfer(const FrontEndModel& model, double freq);

/// e1 = e2 -> (Out1 - Out2); exactly zero for a symmetric model.
TransferResponse common_mode_transfer(const FrontEndModel& model, double freq);

/// 20 log10(|Hd| / |Hc|), or the model's ceiling when |Hc| underflows.
double theoretical_cmrr(const FrontEndModel& model, double freq);

/// Combines per-limiter CMRRs by summing their common-mode leakage powers.
/// Throws DomainError for an empty list.
double composite_cmrr(std::span<const double> components_db);

/// Ratio in dB with the ceiling rule applied.
double cmrr_db_from_gains(double differential_mag, double common_mode_mag, double ceiling_db);

/// Bio-potential amplifier that records Out1 - Out2. Its own common-mode
/// leakage is flat at `floor_db` below `corner_hz` and grows first-order above.
struct AmplifierModel {
  double floor_db = 70.0;
  double corner_hz = 50.0;
  double noise_density = 0.0;  // V/sqrt(Hz) at the recorded output

  std::complex<double> leakage(double freq) const;
  double cmrr_at(double freq) const;
  void validate() const;
};

/// Sensor followed by the amplifier; common-mode leakage adds coherently.
struct ChainResponse {
  std::complex<double> differential;
  std::complex<double> common_mode;
};
ChainResponse chain_transfer(const FrontEndModel& model, const AmplifierModel& amp, double freq);
double chain_cmrr(const FrontEndModel& model, const AmplifierModel& amp, double freq);

/// Theoretical limiters, each evaluated with every other mismatch removed.
struct CmrrComponents {
  double filter = 0.0;
  double gain_mismatch = 0.0;
  double input_impedance = 0.0;
  double amplifier = 0.0;
};
CmrrComponents cmrr_components(const FrontEndModel& model, const AmplifierModel& amp, double freq);

/// DC operating point produced by bias currents. `input` is the offset at the
/// buffer inputs (bias times source resistance), `output` at Out1/Out2.
struct StaticOffsets {
  std::array<double, 2> input{};
  std::array<double, 2> output{};
};
StaticOffsets static_offsets(const FrontEndModel& model);

struct SimulationOptions {
  bool include_bias = true;
  bool synthesize_noise = false;
  std::uint64_t noise_seed = kDefaultSeed;
};

/// Time-domain response (Out1, Out2) to the electrode drive. The network is
/// discretized with the trapezoidal rule prewarped at the filter cutoff.
/// Electrode nodes start settled on the first input sample, filter capacitors
/// start at the bias-only operating point. Throws ConfigError when the sample
/// rate is below 4x the cutoff.
synth::TerminalPair apply_frontend(const FrontEndModel& model, const synth::TerminalPair& input,
                                   const SimulationOptions& options = {});

/// Analog response of the state-space model that apply_frontend discretizes,
/// for output `side` (0 or 1) given electrode drive (e1, e2).
std::complex<double> state_space_response(const FrontEndModel& model, double freq,
                                          std::complex<double> e1, std::complex<double> e2,
                                          int side);

/// Amplifier applied to a sampled (Out1, Out2) pair: returns the recorded
/// differential including its common-mode leakage (noise is not added here).
std::vector<double> apply_amplifier(const AmplifierModel& amp, const synth::TerminalPair& outputs);

}  // namespace semg::afe
