#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "semg/afe_io.hpp"
#include "semg/bench_report.hpp"
#include "semg/cmrr_bench.hpp"
#include "semg/errors.hpp"
#include "semg/evaluation.hpp"
#include "semg/keyvalue.hpp"
#include "semg/recording.hpp"
#include "semg/rng.hpp"
#include "semg/stream_decoder.hpp"
#include "semg/synth.hpp"

namespace semg::cli {
namespace fs = std::filesystem;
namespace {

std::string num(double v, int precision = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("SEMG_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw FormatError(FormatError::Kind::Io, "write failed for " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Kind::Io, "write failed for " + path.string());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number in list: '" + item + "'");
    }
  }
  return v;
}

// Settings shared by every subcommand: config file, overrides, seed.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = kDefaultSeed;

  KeyValueConfig load() const {
    KeyValueConfig kv;
    if (!config_path.empty()) kv = KeyValueConfig::load(config_path);
    for (const auto& o : overrides) kv.set_from_assignment(o);
    return kv;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Plain-text key = value settings file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override one setting, key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "Random seed (default " + std::to_string(kDefaultSeed) + ")");
}

void take_protocol(const KeyValueConfig& kv, ProtocolSpec& p) {
  kv.take("sample_rate", p.sample_rate);
  kv.take("channels", p.channels);
  kv.take("hold", p.hold);
  kv.take("rest", p.rest);
  kv.take("reps", p.reps_per_gesture);
  if (auto g = kv.take_string("gestures")) p.gestures = parse_gesture_list(*g);
}

void take_noise(const KeyValueConfig& kv, synth::InterferenceModel& n) {
  kv.take("noise.powerline_freq", n.powerline_freq);
  kv.take("noise.powerline_amplitude", n.powerline_common_mode_amplitude);
  kv.take("noise.white_density", n.white_noise_density);
  kv.take("noise.wander_amplitude", n.baseline_wander_amplitude);
  kv.take("noise.wander_corner", n.baseline_wander_corner);
  kv.take("noise.motion_rate", n.motion_burst_rate);
  kv.take("noise.motion_amplitude", n.motion_amplitude);
  kv.take("noise.motion_duration", n.motion_duration);
}

void take_pipeline(const KeyValueConfig& kv, pipeline::PipelineConfig& c) {
  kv.take("pipeline.band_low", c.filter.low);
  kv.take("pipeline.band_high", c.filter.high);
  kv.take("pipeline.order", c.filter.order);
  int notch = c.filter.notch_enabled ? 1 : 0;
  kv.take("pipeline.notch", notch);
  c.filter.notch_enabled = notch != 0;
  kv.take("pipeline.notch_center", c.filter.notch_center);
  kv.take("pipeline.notch_q", c.filter.notch_q);
  kv.take("pipeline.envelope_cutoff", c.envelope.cutoff);
  kv.take("pipeline.onset_k", c.onset.k);
  kv.take("pipeline.baseline_window", c.onset.baseline_window);
  kv.take("pipeline.hysteresis", c.onset.hysteresis);
  kv.take("pipeline.window", c.window);
  kv.take("pipeline.rejection_factor", c.rejection_factor);
  if (auto p = kv.take_string("pipeline.phase")) {
    if (*p == "causal") c.phase = pipeline::Phase::Causal;
    else if (*p == "zero_phase") c.phase = pipeline::Phase::ZeroPhase;
    else throw ConfigError("pipeline.phase must be causal or zero_phase");
  }
}

afe::SensorConfig sensor_from(const std::string& model_path, const KeyValueConfig& kv) {
  afe::SensorConfig cfg;
  if (!model_path.empty()) {
    if (!fs::exists(model_path)) throw FormatError(FormatError::Kind::Io, "model file " + model_path + " not found");
    cfg = afe::load_sensor_config(model_path);
  }
  apply_sensor_keys(kv, cfg);
  return cfg;
}

std::string label_histogram(const ingest::Recording& rec) {
  std::array<std::size_t, kGestureCount> count{};
  for (auto g : rec.labels) ++count[index_of(g)];
  std::string s;
  for (std::size_t i = 0; i < kGestureCount; ++i) {
    if (count[i] == 0) continue;
    if (!s.empty()) s += ' ';
    s += std::string(name_of(static_cast<GestureLabel>(i))) + '=' + std::to_string(count[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// synth-session

struct SynthArgs {
  Common common;
  std::string out;
  std::string subject = "A";
  std::optional<int> subject_index;
  std::optional<int> reps;
  std::optional<std::string> gestures;
  std::optional<double> hold, rest, fs;
  bool frontend = false;
  std::string model;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto kv = a.common.load();
  ProtocolSpec protocol;
  synth::InterferenceModel noise;
  take_protocol(kv, protocol);
  take_noise(kv, noise);
  std::string subject = a.subject;
  kv.take("subject", subject);
  int subject_index = -1;
  kv.take("subject_index", subject_index);
  std::optional<afe::SensorConfig> sensor;
  if (a.frontend || !a.model.empty()) sensor = sensor_from(a.model, kv);
  kv.reject_unused("synth-session settings");

  if (a.reps) protocol.reps_per_gesture = *a.reps;
  if (a.gestures) protocol.gestures = parse_gesture_list(*a.gestures);
  if (a.hold) protocol.hold = *a.hold;
  if (a.rest) protocol.rest = *a.rest;
  if (a.fs) protocol.sample_rate = *a.fs;
  if (a.subject_index) subject_index = *a.subject_index;

  const auto tmpl = subject_index >= 0 ? synth::subject_template(static_cast<std::size_t>(subject_index), a.common.seed)
                                       : synth::default_template();
  synth::SessionOptions opts;
  opts.subject_id = subject;
  if (sensor) opts.frontend = &sensor->frontend;
  const auto rec = synth::generate_session(protocol, tmpl, noise, a.common.seed, opts);
  const fs::path path = a.out.empty() ? default_out_dir() / "session.semg" : fs::path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  ingest::write_recording(rec, path);
  out << "wrote " << path.string() << '\n'
      << "subject " << subject << ", seed " << a.common.seed << '\n'
      << "duration " << num(static_cast<double>(rec.samples()) / rec.sample_rate(), 1) << " s, "
      << rec.channels.size() << " channels at " << num(rec.sample_rate(), 0) << " Hz, " << rec.samples()
      << " samples\n"
      << "labels: " << label_histogram(rec) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// theory-cmrr

struct TheoryArgs {
  Common common;
  std::string model;
  std::string freqs;
  std::string source = "frontend";
  bool components = false;
  std::string out;
};

int cmd_theory(const TheoryArgs& a, std::ostream& out) {
  const auto kv = a.common.load();
  const auto sensor = sensor_from(a.model, kv);
  kv.reject_unused("theory-cmrr settings");
  const auto freqs = a.freqs.empty() ? bench::default_frequency_grid() : parse_list(a.freqs);
  for (double f : freqs) {
    if (!(f > 0.0)) throw ConfigError("frequencies must be positive");
  }
  std::ostringstream csv;
  csv << "freq_hz,cmrr_db";
  if (a.components) csv << ",filter_db,gain_mismatch_db,input_impedance_db,amplifier_db";
  csv << '\n';
  for (double f : freqs) {
    const auto c = afe::cmrr_components(sensor.frontend, sensor.amplifier, f);
    double v = 0.0;
    if (a.source == "frontend") {
      v = afe::theoretical_cmrr(sensor.frontend, f);
    } else if (a.source == "chain") {
      v = afe::chain_cmrr(sensor.frontend, sensor.amplifier, f);
    } else {
      const double parts[] = {c.filter, c.gain_mismatch, c.input_impedance, c.amplifier};
      v = afe::composite_cmrr(parts);
    }
    csv << num(f, 4) << ',' << num(v, 4);
    if (a.components) {
      csv << ',' << num(c.filter, 4) << ',' << num(c.gain_mismatch, 4) << ',' << num(c.input_impedance, 4)
          << ',' << num(c.amplifier, 4);
    }
    csv << '\n';
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_text(a.out, csv.str());
    out << "wrote " << a.out << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// bench-cmrr

struct BenchArgs {
  Common common;
  std::string model;
  std::string out;
  std::string freqs;
  std::optional<double> fs, duration, amplitude;
  std::string dut = "chain";
  bool calibrate = false;
  bool serial = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const auto kv = a.common.load();
  auto sensor = sensor_from(a.model, kv);
  bench::BenchConfig cfg;
  kv.take("bench.sample_rate", cfg.sample_rate);
  kv.take("bench.oversample", cfg.oversample);
  kv.take("bench.duration", cfg.tone_duration);
  kv.take("bench.settle", cfg.settle);
  kv.take("bench.amplitude", cfg.tone_amplitude);
  kv.take("bench.segment", cfg.psd.segment_seconds);
  kv.take("bench.overlap", cfg.psd.overlap);
  int halfwidth = static_cast<int>(cfg.peak_halfwidth);
  kv.take("bench.halfwidth", halfwidth);
  if (halfwidth < 0) throw ConfigError("bench.halfwidth must be >= 0");
  cfg.peak_halfwidth = static_cast<std::size_t>(halfwidth);
  if (auto f = kv.take_string("bench.freqs")) cfg.freqs = parse_list(*f);
  kv.reject_unused("bench-cmrr settings");

  if (!a.freqs.empty()) cfg.freqs = parse_list(a.freqs);
  if (a.fs) cfg.sample_rate = *a.fs;
  if (a.duration) cfg.tone_duration = *a.duration;
  if (a.amplitude) cfg.tone_amplitude = *a.amplitude;
  cfg.seed = a.common.seed;
  cfg.parallel = !a.serial;
  cfg.ceiling_db = sensor.frontend.cmrr_ceiling_db;
  cfg.validate();

  if (a.calibrate) {
    const auto cal = bench::calibrate_differential_resistance(sensor.frontend, sensor.amplifier,
                                                              bench::default_frequency_grid());
    out << "calibrated filter.differential_resistance = " << num(cal.differential_resistance, 1)
        << " ohm (chain theory mean " << num(cal.mean_db, 3) << " dB after " << cal.iterations
        << " bisection steps)\n";
    sensor.frontend.filter.differential_resistance = cal.differential_resistance;
  }

  std::unique_ptr<bench::DeviceUnderTest> dut;
  if (a.dut == "frontend") {
    dut = std::make_unique<bench::FrontEndDut>(sensor.frontend);
  } else {
    dut = std::make_unique<bench::SensorChainDut>(sensor.frontend, sensor.amplifier);
  }
  const auto measured = bench::sweep(*dut, cfg);
  std::vector<double> grid;
  for (const auto& p : measured.points) grid.push_back(p.freq);
  std::vector<double> valid_grid;
  for (double f : grid) {
    if (f > 0.0) valid_grid.push_back(f);
  }
  const auto theory = a.dut == "frontend" ? bench::theory_curve(sensor.frontend, valid_grid)
                                          : bench::chain_theory_curve(sensor.frontend, sensor.amplifier, valid_grid);

  std::ostringstream report;
  report << "device: " << dut->describe() << ", fs " << num(cfg.sample_rate, 0) << " Hz, "
         << num(cfg.tone_duration, 1) << " s per tone, seed " << cfg.seed << '\n';
  bool any_valid = false;
  for (const auto& p : measured.points) any_valid = any_valid || !bench::is_failure(p.flag);
  if (any_valid) {
    report << bench::comparison_table(bench::compare_to_theory(measured, sensor.frontend, sensor.amplifier));
  }
  for (const auto& p : measured.points) {
    if (p.flag != bench::PointFlag::None) {
      report << "flag " << bench::to_string(p.flag) << " at " << num(p.freq, 2) << " Hz";
      if (!p.note.empty()) report << ": " << p.note;
      report << '\n';
    }
  }
  out << report.str();

  const fs::path dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
  fs::create_directories(dir);
  write_text(dir / "cmrr.csv", bench::curves_csv({measured, theory}));
  write_text(dir / "report.txt", report.str());
  write_text(dir / "cmrr.svg", bench::curves_svg({measured, theory}, {"measured", "theory"}));
  out << "wrote " << (dir / "cmrr.csv").string() << ", report.txt, cmrr.svg\n";
  return measured.any_failure() ? kFlagged : kOk;
}

// ---------------------------------------------------------------------------
// decode / encode

struct DecodeArgs {
  Common common;
  std::string in, out;
  double vref = 4.5, gain = 24.0, fs = 250.0;
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  const auto kv = a.common.load();
  kv.reject_unused("decode settings");
  const auto bytes = read_bytes(a.in);
  const auto decoded = ingest::stream_decode(bytes);
  ingest::ConversionSpec conv{a.vref, a.gain};
  auto rec = ingest::recording_from_frames(decoded.frames, decoded.stats, conv, a.fs);
  rec.header.seed = a.common.seed;
  rec.header.subject_id = fs::path(a.in).stem().string();
  const fs::path path = a.out.empty() ? default_out_dir() / "decoded.semg" : fs::path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  ingest::write_recording(rec, path);
  const auto& s = decoded.stats;
  out << "wrote " << path.string() << '\n'
      << "frames_ok " << s.frames_ok << ", frames_corrupt " << s.frames_corrupt << ", frames_dropped "
      << s.frames_dropped << ", resyncs " << s.resyncs << '\n';
  return (s.frames_corrupt > 0 || s.frames_dropped > 0) ? kFlagged : kOk;
}

struct EncodeArgs {
  Common common;
  std::string in, out;
};

int cmd_encode(const EncodeArgs& a, std::ostream& out) {
  a.common.load().reject_unused("encode settings");
  const auto rec = ingest::read_recording(a.in);
  const auto bytes = ingest::frames_from_recording(rec);
  const fs::path path = a.out.empty() ? default_out_dir() / "stream.bin" : fs::path(a.out);
  write_bytes(path, bytes);
  out << "wrote " << path.string() << " (" << bytes.size() / ingest::kFrameSize << " frames)\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// train / evaluate

struct TrainArgs {
  Common common;
  std::string in, out;
  std::optional<double> window;
  std::string phase;
  std::string gestures = "thumb,index,middle,ring,hand_closure";
};

pipeline::PipelineConfig pipeline_from(const KeyValueConfig& kv, std::optional<double> window,
                                       const std::string& phase) {
  pipeline::PipelineConfig cfg;
  take_pipeline(kv, cfg);
  if (window) cfg.window = *window;
  if (phase == "causal") cfg.phase = pipeline::Phase::Causal;
  else if (phase == "zero_phase") cfg.phase = pipeline::Phase::ZeroPhase;
  else if (!phase.empty()) throw ConfigError("--phase must be causal or zero_phase");
  return cfg;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto kv = a.common.load();
  const auto cfg = pipeline_from(kv, a.window, a.phase);
  kv.reject_unused("train settings");
  const auto rec = ingest::read_recording(a.in);
  const auto model = pipeline::train_subject(rec, cfg, parse_gesture_list(a.gestures));
  const fs::path path = a.out.empty() ? default_out_dir() / (rec.header.subject_id + ".semgmdl") : fs::path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  pipeline::save_model(model, path);
  out << "wrote " << path.string() << '\n'
      << "subject " << model.subject_id << ", " << model.templates.size() << " templates of " << model.channels
      << " x " << model.samples << ", rejection threshold " << num(model.threshold, 4) << '\n';
  return kOk;
}

struct EvaluateArgs {
  Common common;
  std::vector<std::string> in;
  std::vector<std::string> models;
  int subjects = 4;
  std::uint64_t split_seed = kDefaultSeed;
  double train_fraction = 0.5;
  std::optional<double> window;
  std::string phase;
  std::string noise_levels;
  int sweep_seeds = 5;
  double threshold = 85.0;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto kv = a.common.load();
  const auto cfg = pipeline_from(kv, a.window, a.phase);
  synth::CorpusSpec corpus;
  corpus.subjects = a.subjects;
  corpus.seed = a.common.seed;
  take_protocol(kv, corpus.protocol);
  take_noise(kv, corpus.noise);
  kv.reject_unused("evaluate settings");

  pipeline::SplitSpec split{a.train_fraction, a.split_seed};
  if (!a.noise_levels.empty()) {
    if (!a.in.empty()) throw ConfigError("--noise-levels regenerates synthetic corpora; drop --in");
    out << "white_noise_density_v_per_rthz,mean_overall_pct\n";
    for (double level : parse_list(a.noise_levels)) {
      double sum = 0.0;
      for (int s = 0; s < a.sweep_seeds; ++s) {
        auto spec = corpus;
        spec.noise.white_noise_density = level;
        spec.seed = derive_seed(a.common.seed, "noise-sweep", static_cast<std::uint64_t>(s));
        sum += pipeline::evaluate(synth::generate_corpus(spec), cfg, split).overall;
      }
      out << level << ',' << num(sum / a.sweep_seeds, 2) << '\n';
    }
    return kOk;
  }

  std::vector<ingest::Recording> recs;
  if (a.in.empty()) {
    recs = synth::generate_corpus(corpus);
  } else {
    for (const auto& p : a.in) recs.push_back(ingest::read_recording(p));
  }
  pipeline::EvaluationReport report;
  if (!a.models.empty()) {
    if (a.models.size() != recs.size()) throw ConfigError("--model needs one file per --in recording");
    std::vector<pipeline::ClassifierModel> models;
    for (const auto& p : a.models) models.push_back(pipeline::load_model(p));
    report = pipeline::evaluate_models(recs, models);
  } else {
    report = pipeline::evaluate(recs, cfg, split);
  }
  const std::string table = pipeline::report_text(report);
  const bool pass = report.overall >= a.threshold;
  out << "Classification accuracy (%), " << pipeline::to_string(report.phase) << " filtering, split seed "
      << report.split_seed << '\n'
      << table << pipeline::confusion_text(report) << "overall average " << num(report.overall, 1) << "% "
      << (pass ? "PASS" : "FAIL") << " (threshold " << num(a.threshold, 1) << "%)\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "report.txt", table);
    write_text(fs::path(a.out) / "report.csv", pipeline::report_csv(report));
    write_text(fs::path(a.out) / "confusion.txt", pipeline::confusion_text(report));
  }
  return pass ? kOk : kFlagged;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"semg: dry-contact sEMG sensor toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth-session", "Generate a labeled synthetic session file");
  add_common(synth_cmd, sa.common);
  synth_cmd->add_option("--out", sa.out, "Output recording path (default $SEMG_OUT_DIR/session.semg)");
  synth_cmd->add_option("--subject", sa.subject, "Subject id stored in the header");
  synth_cmd->add_option("--subject-index", sa.subject_index, "Perturb activation patterns as virtual subject N");
  synth_cmd->add_option("--reps", sa.reps, "Repetitions per gesture (count)");
  synth_cmd->add_option("--gestures", sa.gestures, "Comma-separated gesture list, e.g. thumb,index");
  synth_cmd->add_option("--hold", sa.hold, "Hold duration (s)");
  synth_cmd->add_option("--rest", sa.rest, "Rest duration (s)");
  synth_cmd->add_option("--fs", sa.fs, "Sample rate (Hz)");
  synth_cmd->add_flag("--frontend", sa.frontend, "Route every channel through the sensor model");
  synth_cmd->add_option("--model", sa.model, "Sensor model file (key = value, SI units); implies --frontend");

  TheoryArgs ta;
  auto* theory_cmd = app.add_subcommand("theory-cmrr", "Print theoretical CMRR (dB) versus frequency as CSV");
  add_common(theory_cmd, ta.common);
  theory_cmd->add_option("--model", ta.model, "Sensor model file (key = value, SI units)");
  theory_cmd->add_option("--freqs", ta.freqs, "Comma-separated frequencies (Hz); default 25 log points 10-500 Hz");
  theory_cmd->add_option("--source", ta.source, "frontend | chain | composite")
      ->check(CLI::IsMember({"frontend", "chain", "composite"}));
  theory_cmd->add_flag("--components", ta.components, "Add per-limiter columns (dB)");
  theory_cmd->add_option("--out", ta.out, "CSV path (default stdout)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench-cmrr", "Measure CMRR with differential and common-mode tones");
  add_common(bench_cmd, ba.common);
  bench_cmd->add_option("--model", ba.model, "Sensor model file (key = value, SI units)");
  bench_cmd->add_option("--out", ba.out, "Output directory for cmrr.csv, report.txt, cmrr.svg");
  bench_cmd->add_option("--freqs", ba.freqs, "Comma-separated drive frequencies (Hz)");
  bench_cmd->add_option("--fs", ba.fs, "Bench sample rate (Hz, default 2000)");
  bench_cmd->add_option("--duration", ba.duration, "Analysed tone duration per mode (s, default 10)");
  bench_cmd->add_option("--amplitude", ba.amplitude, "Tone amplitude (V, default 0.01)");
  bench_cmd->add_option("--dut", ba.dut, "chain (sensor + amplifier) | frontend (sensor only)")
      ->check(CLI::IsMember({"chain", "frontend"}));
  bench_cmd->add_flag("--calibrate", ba.calibrate, "Re-tune the differential resistor to a 59 dB mean first");
  bench_cmd->add_flag("--serial", ba.serial, "Measure points one after another");

  DecodeArgs da;
  auto* decode_cmd = app.add_subcommand("decode", "Decode a raw frame stream into a recording");
  add_common(decode_cmd, da.common);
  decode_cmd->add_option("--in", da.in, "Raw byte stream")->required();
  decode_cmd->add_option("--out", da.out, "Output recording path");
  decode_cmd->add_option("--vref", da.vref, "ADC reference (V)");
  decode_cmd->add_option("--gain", da.gain, "Programmable gain (dimensionless)");
  decode_cmd->add_option("--fs", da.fs, "Frame rate (Hz)");

  EncodeArgs ea;
  auto* encode_cmd = app.add_subcommand("encode", "Encode a recording as a raw frame stream");
  add_common(encode_cmd, ea.common);
  encode_cmd->add_option("--in", ea.in, "Recording file")->required();
  encode_cmd->add_option("--out", ea.out, "Output byte stream path");

  TrainArgs tra;
  auto* train_cmd = app.add_subcommand("train", "Train a per-subject template classifier");
  add_common(train_cmd, tra.common);
  train_cmd->add_option("--in", tra.in, "Labeled recording")->required();
  train_cmd->add_option("--out", tra.out, "Model path (default $SEMG_OUT_DIR/<subject>.semgmdl)");
  train_cmd->add_option("--window", tra.window, "Map window length (s, default 3)");
  train_cmd->add_option("--phase", tra.phase, "zero_phase | causal filtering");
  train_cmd->add_option("--gestures", tra.gestures, "Gestures that must be present (comma-separated)");

  EvaluateArgs eva;
  auto* eval_cmd = app.add_subcommand("evaluate", "Per-subject accuracy table");
  add_common(eval_cmd, eva.common);
  eval_cmd->add_option("--in", eva.in, "Recordings (default: synthetic corpus)");
  eval_cmd->add_option("--model", eva.models, "Trained models, one per --in, skips the split");
  eval_cmd->add_option("--subjects", eva.subjects, "Virtual subjects in the synthetic corpus (count)");
  eval_cmd->add_option("--split-seed", eva.split_seed, "Seed of the train/test split");
  eval_cmd->add_option("--train-fraction", eva.train_fraction, "Share of reps used for training (0-1)");
  eval_cmd->add_option("--window", eva.window, "Map window length (s, default 3)");
  eval_cmd->add_option("--phase", eva.phase, "zero_phase | causal filtering");
  eval_cmd->add_option("--noise-levels", eva.noise_levels,
                       "SNR sweep: comma-separated white-noise densities (V/sqrt(Hz))");
  eval_cmd->add_option("--sweep-seeds", eva.sweep_seeds, "Corpora averaged per noise level (count)");
  eval_cmd->add_option("--threshold", eva.threshold, "Pass threshold on the overall average (%)");
  eval_cmd->add_option("--out", eva.out, "Directory for report.txt, report.csv, confusion.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(sa, out);
    if (*theory_cmd) return cmd_theory(ta, out);
    if (*bench_cmd) return cmd_bench(ba, out);
    if (*decode_cmd) return cmd_decode(da, out);
    if (*encode_cmd) return cmd_encode(ea, out);
    if (*train_cmd) return cmd_train(tra, out);
    if (*eval_cmd) return cmd_evaluate(eva, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace semg::cli
