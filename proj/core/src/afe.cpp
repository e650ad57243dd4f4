#include "semg/afe.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "semg/errors.hpp"
#include "semg/rng.hpp"

namespace semg::afe {
namespace {

using cplx = std::complex<double>;
using std::numbers::pi;

constexpr int kStates = 4;  // s1, s2 (electrode node charge), w1, w2 (filter capacitor voltage)
constexpr int kInputs = 6;  // e1, e2, I_in1, I_in2, I_out1, I_out2
using StateMatrix = Eigen::Matrix<double, kStates, kStates>;
using InputMatrix = Eigen::Matrix<double, kStates, kInputs>;
using OutputMatrix = Eigen::Matrix<double, 2, kStates>;
using FeedMatrix = Eigen::Matrix<double, 2, kInputs>;
using StateVector = Eigen::Matrix<double, kStates, 1>;
using InputVector = Eigen::Matrix<double, kInputs, 1>;
// Linear form over the stacked vector [x; u].
using Form = Eigen::Matrix<double, 1, kStates + kInputs>;

double parallel(double a, double b) {
  if (std::isinf(a)) return b;
  if (std::isinf(b)) return a;
  return a * b / (a + b);
}

double conductance(double r) { return std::isinf(r) ? 0.0 : 1.0 / r; }

// Voltage at the buffer input for electrode drive e.
cplx input_node(const ElectrodeSkinInterface& el, const BufferStage& buf, const TvsStage& tvs,
                double w, cplx e) {
  const cplx ye(1.0 / el.r_series, w * el.c_parallel);
  const cplx yin(conductance(buf.input_resistance),
                 w * (buf.input_capacitance + tvs.line_capacitance));
  return e * ye / (ye + yin);
}

std::array<cplx, 2> outputs(const FrontEndModel& m, double freq, cplx e1, cplx e2) {
  const double w = 2.0 * pi * freq;
  const auto rf = m.filter.realized();
  const cplx u1 = m.input_buffers[0].gain * input_node(m.electrodes[0], m.input_buffers[0], m.tvs, w, e1);
  const cplx u2 = m.input_buffers[1].gain * input_node(m.electrodes[1], m.input_buffers[1], m.tvs, w, e2);

  // KCL at the two filter nodes; Cramer's rule keeps a symmetric network
  // bit-for-bit symmetric so the common-mode output cancels exactly.
  const double gd = conductance(rf.differential_resistance);
  const cplx yc1(0.0, w * rf.capacitance[0]);
  const cplx yc2(0.0, w * rf.capacitance[1]);
  const cplx a11 = yc1 + (1.0 / rf.bias_resistance[0] + gd);
  const cplx a22 = yc2 + (1.0 / rf.bias_resistance[1] + gd);
  const cplx r1 = yc1 * u1;
  const cplx r2 = yc2 * u2;
  const cplx det = a11 * a22 - gd * gd;
  const cplx n1 = (r1 * a22 + gd * r2) / det;
  const cplx n2 = (r2 * a11 + gd * r1) / det;
  return {m.output_buffers[0].gain * n1, m.output_buffers[1].gain * n2};
}

struct StateSpace {
  StateMatrix a = StateMatrix::Zero();
  InputMatrix b = InputMatrix::Zero();
  OutputMatrix c = OutputMatrix::Zero();
  FeedMatrix d = FeedMatrix::Zero();
};

StateSpace build_state_space(const FrontEndModel& m) {
  const auto rf = m.filter.realized();
  const double gd = conductance(rf.differential_resistance);
  StateSpace ss;

  auto x_index = [](int i) { return i; };
  auto u_index = [](int i) { return kStates + i; };

  std::array<Form, 2> b_node{};
  for (int i = 0; i < 2; ++i) {
    const auto& el = m.electrodes[i];
    const auto& buf = m.input_buffers[i];
    const double ge = 1.0 / el.r_series;
    const double gin = conductance(buf.input_resistance);
    const double ct = el.c_parallel + buf.input_capacitance + m.tvs.line_capacitance;
    Form& b = b_node[i];
    b.setZero();
    if (ct > 0.0) {
      // s = ct * b - ce * e  (charge on the input node)
      b(x_index(i)) = 1.0 / ct;
      b(u_index(i)) = el.c_parallel / ct;
      Form ds = Form::Zero();
      ds(u_index(i)) = ge;
      ds -= (ge + gin) * b;
      ds(u_index(2 + i)) += 1.0;
      ss.a.row(i) = ds.head<kStates>();
      ss.b.row(i) = ds.tail<kInputs>();
    } else {
      // Purely resistive divider: the node is algebraic, state i is unused.
      b(u_index(i)) = ge / (ge + gin);
      b(u_index(2 + i)) = 1.0 / (ge + gin);
      ss.a(i, i) = -1.0;
    }
  }

  std::array<Form, 2> n_node{};
  for (int i = 0; i < 2; ++i) {
    Form n = m.input_buffers[i].gain * b_node[i];
    n(x_index(2 + i)) -= 1.0;
    n_node[i] = n;
  }
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    Form dw = (1.0 / rf.bias_resistance[i]) * n_node[i] + gd * (n_node[i] - n_node[j]);
    dw(u_index(4 + i)) -= 1.0;
    dw /= rf.capacitance[i];
    ss.a.row(2 + i) = dw.head<kStates>();
    ss.b.row(2 + i) = dw.tail<kInputs>();

    const Form out = m.output_buffers[i].gain * n_node[i];
    ss.c.row(i) = out.head<kStates>();
    ss.d.row(i) = out.tail<kInputs>();
  }
  return ss;
}

BufferStage averaged(const BufferStage& a, const BufferStage& b) {
  BufferStage out = a;
  out.input_resistance = 0.5 * (a.input_resistance + b.input_resistance);
  out.input_capacitance = 0.5 * (a.input_capacitance + b.input_capacitance);
  return out;
}

void match_inputs(FrontEndModel& m) {
  ElectrodeSkinInterface el;
  el.r_series = 0.5 * (m.electrodes[0].r_series + m.electrodes[1].r_series);
  el.c_parallel = 0.5 * (m.electrodes[0].c_parallel + m.electrodes[1].c_parallel);
  m.electrodes = {el, el};
  const auto buf = averaged(m.input_buffers[0], m.input_buffers[1]);
  for (auto& b : m.input_buffers) {
    b.input_resistance = buf.input_resistance;
    b.input_capacitance = buf.input_capacitance;
  }
}

void unity_gains(FrontEndModel& m) {
  for (auto& b : m.input_buffers) b.gain = 1.0;
  for (auto& b : m.output_buffers) b.gain = 1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// parameters

void ElectrodeSkinInterface::validate() const {
  if (!(r_series > 0.0)) throw DomainError("electrode r_series must be positive");
  if (!(c_parallel >= 0.0)) throw DomainError("electrode c_parallel must be >= 0");
}

void BufferStage::validate() const {
  if (!(gain >= 0.99 && gain <= 1.01)) throw DomainError("buffer gain must lie in [0.99, 1.01]");
  if (!(input_resistance > 0.0)) throw DomainError("buffer input_resistance must be positive");
  if (!(input_capacitance >= 0.0)) throw DomainError("buffer input_capacitance must be >= 0");
  if (!(bias_current >= 0.0) && !(bias_current < 0.0)) throw DomainError("buffer bias_current is NaN");
  if (!(current_noise_density >= 0.0)) {
    throw DomainError("buffer current_noise_density must be >= 0");
  }
}

void TvsStage::validate() const {
  if (!(line_capacitance >= 0.0)) throw DomainError("tvs line_capacitance must be >= 0");
}

std::string_view to_string(ToleranceMode m) noexcept {
  switch (m) {
    case ToleranceMode::Ideal: return "ideal";
    case ToleranceMode::WorstCase: return "worst_case";
    case ToleranceMode::Seeded: return "seeded";
  }
  return "?";
}

ToleranceMode parse_tolerance_mode(std::string_view text) {
  if (text == "ideal") return ToleranceMode::Ideal;
  if (text == "worst_case" || text == "worst-case") return ToleranceMode::WorstCase;
  if (text == "seeded") return ToleranceMode::Seeded;
  throw ConfigError("unknown tolerance mode '" + std::string(text) + "'");
}

double DiffHighPass::effective_differential_resistance() const {
  return differential_resistance > 0.0 ? differential_resistance
                                       : kCalibratedDifferentialResistance;
}

double DiffHighPass::nominal_capacitance() const {
  const double shunt = parallel(bias_resistance, 0.5 * effective_differential_resistance());
  return 1.0 / (2.0 * pi * cutoff * shunt);
}

DiffHighPass::Realized DiffHighPass::realized() const {
  Realized r;
  const double c = nominal_capacitance();
  r.differential_resistance = effective_differential_resistance();
  switch (mode) {
    case ToleranceMode::Ideal:
      r.capacitance = {c, c};
      r.bias_resistance = {bias_resistance, bias_resistance};
      break;
    case ToleranceMode::WorstCase: {
      const double t = component_tolerance;
      r.capacitance = {c * (1.0 + t), c * (1.0 - t)};
      r.bias_resistance = {bias_resistance * (1.0 + t), bias_resistance * (1.0 - t)};
      break;
    }
    case ToleranceMode::Seeded: {
      Rng rng(derive_seed(tolerance_seed, "filter-tolerance"));
      const double t = component_tolerance;
      r.capacitance[0] = c * (1.0 + t * rng.uniform(-1.0, 1.0));
      r.capacitance[1] = c * (1.0 + t * rng.uniform(-1.0, 1.0));
      r.bias_resistance[0] = bias_resistance * (1.0 + t * rng.uniform(-1.0, 1.0));
      r.bias_resistance[1] = bias_resistance * (1.0 + t * rng.uniform(-1.0, 1.0));
      break;
    }
  }
  return r;
}

void DiffHighPass::validate() const {
  if (!(cutoff > 0.0)) throw DomainError("filter cutoff must be positive");
  if (!(bias_resistance > 0.0)) throw DomainError("filter bias_resistance must be positive");
  if (!(differential_resistance >= 0.0)) {
    throw DomainError("filter differential_resistance must be >= 0 (0 = calibrated default)");
  }
  if (!(component_tolerance >= 0.0 && component_tolerance < 0.5)) {
    throw DomainError("filter component_tolerance must lie in [0, 0.5)");
  }
}

void FrontEndModel::validate() const {
  for (const auto& e : electrodes) e.validate();
  for (const auto& b : input_buffers) b.validate();
  for (const auto& b : output_buffers) b.validate();
  tvs.validate();
  filter.validate();
  if (!(cmrr_ceiling_db > 0.0)) throw DomainError("cmrr ceiling must be positive");
}

FrontEndModel FrontEndModel::ideal() {
  FrontEndModel m;
  m.filter.mode = ToleranceMode::Ideal;
  return m;
}

FrontEndModel default_front_end() {
  FrontEndModel m;
  set_gain_mismatch(m, kDefaultGainMismatch);
  return m;
}

void set_gain_mismatch(FrontEndModel& model, double mismatch) {
  const double q = mismatch / 4.0;
  model.input_buffers[0].gain = 1.0 + q;
  model.output_buffers[0].gain = 1.0 + q;
  model.input_buffers[1].gain = 1.0 - q;
  model.output_buffers[1].gain = 1.0 - q;
}

// ---------------------------------------------------------------------------
// frequency domain

TransferResponse differential_transfer(const FrontEndModel& model, double freq) {
  if (!(freq > 0.0)) throw DomainError("frequency must be positive");
  const auto out = outputs(model, freq, 0.5, -0.5);
  return {freq, out[0] - out[1]};
}

TransferResponse common_mode_transfer(const FrontEndModel& model, double freq) {
  if (!(freq > 0.0)) throw DomainError("frequency must be positive");
  const auto out = outputs(model, freq, 1.0, 1.0);
  return {freq, out[0] - out[1]};
}

double cmrr_db_from_gains(double differential_mag, double common_mode_mag, double ceiling_db) {
  if (!(common_mode_mag > differential_mag * std::pow(10.0, -ceiling_db / 20.0))) {
    return ceiling_db;
  }
  return 20.0 * std::log10(differential_mag / common_mode_mag);
}

double theoretical_cmrr(const FrontEndModel& model, double freq) {
  const double hd = differential_transfer(model, freq).magnitude();
  const double hc = common_mode_transfer(model, freq).magnitude();
  return cmrr_db_from_gains(hd, hc, model.cmrr_ceiling_db);
}

double composite_cmrr(std::span<const double> components_db) {
  if (components_db.empty()) throw DomainError("composite_cmrr needs at least one component");
  double leak = 0.0;
  for (double c : components_db) leak += std::pow(10.0, -c / 10.0);
  return -10.0 * std::log10(leak);
}

std::complex<double> AmplifierModel::leakage(double freq) const {
  return std::pow(10.0, -floor_db / 20.0) * cplx(1.0, freq / corner_hz);
}

double AmplifierModel::cmrr_at(double freq) const {
  return floor_db - 10.0 * std::log10(1.0 + (freq / corner_hz) * (freq / corner_hz));
}

void AmplifierModel::validate() const {
  if (!(floor_db > 0.0)) throw DomainError("amplifier floor_db must be positive");
  if (!(corner_hz > 0.0)) throw DomainError("amplifier corner_hz must be positive");
  if (!(noise_density >= 0.0)) throw DomainError("amplifier noise_density must be >= 0");
}

ChainResponse chain_transfer(const FrontEndModel& model, const AmplifierModel& amp, double freq) {
  if (!(freq > 0.0)) throw DomainError("frequency must be positive");
  const cplx leak = amp.leakage(freq);
  const auto dm = outputs(model, freq, 0.5, -0.5);
  const auto cm = outputs(model, freq, 1.0, 1.0);
  return {dm[0] - dm[1] + leak * 0.5 * (dm[0] + dm[1]),
          cm[0] - cm[1] + leak * 0.5 * (cm[0] + cm[1])};
}

double chain_cmrr(const FrontEndModel& model, const AmplifierModel& amp, double freq) {
  const auto r = chain_transfer(model, amp, freq);
  return cmrr_db_from_gains(std::abs(r.differential), std::abs(r.common_mode),
                            model.cmrr_ceiling_db);
}

CmrrComponents cmrr_components(const FrontEndModel& model, const AmplifierModel& amp, double freq) {
  CmrrComponents c;
  {
    FrontEndModel m = model;
    unity_gains(m);
    match_inputs(m);
    c.filter = theoretical_cmrr(m, freq);
  }
  {
    FrontEndModel m = model;
    m.filter.mode = ToleranceMode::Ideal;
    match_inputs(m);
    c.gain_mismatch = theoretical_cmrr(m, freq);
  }
  {
    FrontEndModel m = model;
    m.filter.mode = ToleranceMode::Ideal;
    unity_gains(m);
    c.input_impedance = theoretical_cmrr(m, freq);
  }
  c.amplifier = amp.cmrr_at(freq);
  return c;
}

StaticOffsets static_offsets(const FrontEndModel& model) {
  StaticOffsets off;
  for (int i = 0; i < 2; ++i) {
    off.input[i] = model.input_buffers[i].bias_current *
                   parallel(model.electrodes[i].r_series, model.input_buffers[i].input_resistance);
  }
  const auto rf = model.filter.realized();
  const double gd = conductance(rf.differential_resistance);
  const double a11 = 1.0 / rf.bias_resistance[0] + gd;
  const double a22 = 1.0 / rf.bias_resistance[1] + gd;
  const double r1 = model.output_buffers[0].bias_current;
  const double r2 = model.output_buffers[1].bias_current;
  const double det = a11 * a22 - gd * gd;
  off.output[0] = model.output_buffers[0].gain * (r1 * a22 + gd * r2) / det;
  off.output[1] = model.output_buffers[1].gain * (r2 * a11 + gd * r1) / det;
  return off;
}

std::complex<double> state_space_response(const FrontEndModel& model, double freq, cplx e1, cplx e2,
                                          int side) {
  const auto ss = build_state_space(model);
  const double w = 2.0 * pi * freq;
  Eigen::Matrix<cplx, kStates, kStates> m =
      cplx(0.0, w) * Eigen::Matrix<cplx, kStates, kStates>::Identity() - ss.a.cast<cplx>();
  Eigen::Matrix<cplx, kInputs, 1> u = Eigen::Matrix<cplx, kInputs, 1>::Zero();
  u(0) = e1;
  u(1) = e2;
  const Eigen::Matrix<cplx, kStates, 1> x = m.partialPivLu().solve(ss.b.cast<cplx>() * u);
  const Eigen::Matrix<cplx, 2, 1> y = ss.c.cast<cplx>() * x + ss.d.cast<cplx>() * u;
  return y(side == 0 ? 0 : 1);
}

// ---------------------------------------------------------------------------
// time domain

synth::TerminalPair apply_frontend(const FrontEndModel& model, const synth::TerminalPair& input,
                                   const SimulationOptions& options) {
  model.validate();
  input.validate();
  const double fs = input.sample_rate;
  if (fs < 4.0 * model.filter.cutoff) {
    throw ConfigError("sample rate " + std::to_string(fs) + " Hz is below 4x the " +
                      std::to_string(model.filter.cutoff) + " Hz filter cutoff");
  }

  const auto ss = build_state_space(model);
  const double wc = 2.0 * pi * model.filter.cutoff;
  const double h = 2.0 / wc * std::tan(wc / (2.0 * fs));
  const StateMatrix identity = StateMatrix::Identity();
  const StateMatrix lhs_inv = (identity - 0.5 * h * ss.a).inverse();
  const StateMatrix ad = lhs_inv * (identity + 0.5 * h * ss.a);
  const InputMatrix bd = lhs_inv * ss.b * (0.5 * h);

  InputVector bias = InputVector::Zero();
  if (options.include_bias) {
    bias(2) = model.input_buffers[0].bias_current;
    bias(3) = model.input_buffers[1].bias_current;
    bias(4) = model.output_buffers[0].bias_current;
    bias(5) = model.output_buffers[1].bias_current;
  }

  std::array<double, 4> noise_sd{};
  std::vector<Rng> noise_rng;
  if (options.synthesize_noise) {
    const double root_bw = std::sqrt(fs / 2.0);
    noise_sd = {model.input_buffers[0].current_noise_density * root_bw,
                model.input_buffers[1].current_noise_density * root_bw,
                model.output_buffers[0].current_noise_density * root_bw,
                model.output_buffers[1].current_noise_density * root_bw};
    for (std::uint64_t k = 0; k < 4; ++k) {
      noise_rng.emplace_back(derive_seed(options.noise_seed, "buffer-current-noise", k));
    }
  }

  const std::size_t n = input.size();
  auto input_at = [&](std::size_t i) {
    InputVector u = bias;
    u(0) = input.e1[i];
    u(1) = input.e2[i];
    if (options.synthesize_noise) {
      for (int k = 0; k < 4; ++k) u(2 + k) += noise_sd[k] * noise_rng[k].normal();
    }
    return u;
  };

  synth::TerminalPair out;
  out.sample_rate = fs;
  out.e1.resize(n);
  out.e2.resize(n);
  if (n == 0) return out;

  const auto a_lu = ss.a.partialPivLu();
  InputVector u = input_at(0);
  const StateVector settled = a_lu.solve(-ss.b * u);
  const StateVector at_bias = a_lu.solve(-ss.b * bias);
  StateVector x;
  x << settled(0), settled(1), at_bias(2), at_bias(3);

  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d y = ss.c * x + ss.d * u;
    out.e1[i] = y(0);
    out.e2[i] = y(1);
    if (i + 1 < n) {
      const InputVector next = input_at(i + 1);
      x = ad * x + bd * (u + next);
      u = next;
    }
  }
  return out;
}

std::vector<double> apply_amplifier(const AmplifierModel& amp, const synth::TerminalPair& outputs) {
  amp.validate();
  outputs.validate();
  const std::size_t n = outputs.size();
  std::vector<double> rec(n);
  const double a0 = std::pow(10.0, -amp.floor_db / 20.0);
  const double slope = outputs.sample_rate / (2.0 * pi * amp.corner_hz);
  double prev_cm = n > 0 ? 0.5 * (outputs.e1[0] + outputs.e2[0]) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cm = 0.5 * (outputs.e1[i] + outputs.e2[i]);
    const double leak = a0 * (0.5 * (cm + prev_cm) + (cm - prev_cm) * slope);
    rec[i] = (outputs.e1[i] - outputs.e2[i]) + leak;
    prev_cm = cm;
  }
  return rec;
}

}  // namespace semg::afe
