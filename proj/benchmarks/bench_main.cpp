#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "semg/afe.hpp"
#include "semg/classifier.hpp"
#include "semg/evaluation.hpp"
#include "semg/psd.hpp"
#include "semg/realtime.hpp"
#include "semg/recording.hpp"
#include "semg/stream_decoder.hpp"
#include "semg/synth.hpp"

using namespace semg;

namespace {

const ingest::Recording& session() {
  static const ingest::Recording rec = [] {
    ProtocolSpec p;
    p.reps_per_gesture = 4;
    return synth::generate_session(p, synth::default_template(), synth::InterferenceModel{}, 7);
  }();
  return rec;
}

const pipeline::ClassifierModel& causal_model() {
  static const pipeline::ClassifierModel m = [] {
    pipeline::PipelineConfig cfg;
    cfg.phase = pipeline::Phase::Causal;
    return pipeline::train_subject(session(), cfg);
  }();
  return m;
}

void BM_WelchPsd(benchmark::State& state) {
  const double fs = 2000.0;
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * std::numbers::pi * 70.0 * i / fs);
  for (auto _ : state) benchmark::DoNotOptimize(bench::estimate_psd(x, fs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WelchPsd)->Arg(20000)->Arg(160000);

void BM_ApplyFrontend(benchmark::State& state) {
  const auto model = afe::default_front_end();
  const double fs = 16000.0;
  synth::TerminalPair in;
  in.sample_rate = fs;
  for (int i = 0; i < 16000; ++i) {
    in.e1.push_back(1e-3 * std::sin(2 * std::numbers::pi * 100.0 * i / fs));
    in.e2.push_back(0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(afe::apply_frontend(model, in));
  state.SetItemsProcessed(state.iterations() * 16000);
}
BENCHMARK(BM_ApplyFrontend);

void BM_StreamDecode(benchmark::State& state) {
  const auto bytes = ingest::frames_from_recording(session());
  for (auto _ : state) benchmark::DoNotOptimize(ingest::stream_decode(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_StreamDecode);

void BM_RealtimePush(benchmark::State& state) {
  const auto& rec = session();
  pipeline::RealtimeClassifier rt(causal_model(), rec.header.conversion);
  std::vector<double> frame(rec.channels.size());
  std::size_t i = 0;
  for (auto _ : state) {
    for (std::size_t ch = 0; ch < frame.size(); ++ch) frame[ch] = rec.channels[ch][i];
    benchmark::DoNotOptimize(rt.push(frame));
    i = (i + 1) % rec.samples();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RealtimePush);

void BM_Classify(benchmark::State& state) {
  const auto maps = pipeline::extract_rep_maps(session(), causal_model().config);
  const auto& map = *maps.front().map;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::classify(causal_model(), map));
}
BENCHMARK(BM_Classify);

}  // namespace
BENCHMARK_MAIN();
