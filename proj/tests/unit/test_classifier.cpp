#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semg/classifier.hpp"
#include "semg/errors.hpp"
#include "semg/evaluation.hpp"
#include "semg/rng.hpp"
#include "semg/synth.hpp"
#include "support.hpp"

using namespace semg;
using namespace semg::pipeline;

namespace {

TmaMap map_with(std::size_t channels, std::size_t samples, const std::vector<double>& row_levels) {
  TmaMap m;
  m.channels = channels;
  m.samples = samples;
  m.values.assign(channels * samples, 0.0);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    for (std::size_t i = 0; i < samples; ++i) m.values[ch * samples + i] = row_levels[ch];
  }
  m.degenerate = std::all_of(row_levels.begin(), row_levels.end(), [](double v) { return v == 0.0; });
  return m;
}

// Brute-force nearest template, the oracle for classify.
GestureLabel nearest(const ClassifierModel& m, const TmaMap& map) {
  GestureLabel best = GestureLabel::Neutral;
  double bd = 1e300;
  for (auto g : kActiveGestures) {
    auto it = m.templates.find(g);
    if (it == m.templates.end()) continue;
    double s = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i) s += (map.values[i] - it->second[i]) * (map.values[i] - it->second[i]);
    if (std::sqrt(s) < bd) {
      bd = std::sqrt(s);
      best = g;
    }
  }
  return best;
}

synth::CorpusSpec small_corpus(int subjects, int reps) {
  synth::CorpusSpec spec;
  spec.subjects = subjects;
  spec.protocol.reps_per_gesture = reps;
  return spec;
}

}  // namespace

TEST_CASE("identical maps give exact templates") {
  const auto a = map_with(2, 5, {1.0, 0.0});
  const auto b = map_with(2, 5, {0.0, 1.0});
  const auto model = train({a, a, b, b}, {GestureLabel::Thumb, GestureLabel::Thumb, GestureLabel::Ring, GestureLabel::Ring},
                           PipelineConfig{}, 250.0, {GestureLabel::Thumb, GestureLabel::Ring});
  CHECK(model.templates.at(GestureLabel::Thumb) == a.values);
  CHECK(model.threshold == 0.0);
  CHECK(frobenius_distance(model.templates.at(GestureLabel::Thumb), model.templates.at(GestureLabel::Ring)) > 0.0);
  const auto d = classify(model, a);
  CHECK(d.label == GestureLabel::Thumb);
  CHECK(d.score > 0.0);
  CHECK(classify(model, map_with(2, 5, {0.0, 0.0})).label == GestureLabel::Neutral);
}

TEST_CASE("threshold is 1.5x the largest intra-class distance") {
  const auto a1 = map_with(1, 4, {1.0});
  const auto a2 = map_with(1, 4, {0.5});
  const auto b = map_with(1, 4, {0.1});
  const auto model = train({a1, a2, b, b}, {GestureLabel::Index, GestureLabel::Index, GestureLabel::Middle, GestureLabel::Middle},
                           PipelineConfig{}, 250.0, {GestureLabel::Index, GestureLabel::Middle});
  // mean 0.75 over 4 samples; each member sits 0.25 * 2 = 0.5 away
  CHECK(model.threshold == doctest::Approx(1.5 * 0.5));
  CHECK(classify(model, map_with(1, 4, {5.0})).label == GestureLabel::Neutral);
}

TEST_CASE("ties go to the earlier gesture with zero score") {
  const auto a = map_with(2, 3, {1.0, 0.0});
  const auto b = map_with(2, 3, {0.0, 1.0});
  auto model = train({b, b, a, a}, {GestureLabel::Ring, GestureLabel::Ring, GestureLabel::Thumb, GestureLabel::Thumb},
                     PipelineConfig{}, 250.0, {GestureLabel::Thumb, GestureLabel::Ring});
  model.threshold = 10.0;
  const auto d = classify(model, map_with(2, 3, {0.5, 0.5}));
  CHECK(d.label == GestureLabel::Thumb);
  CHECK(d.score == 0.0);
}

TEST_CASE("training errors") {
  const auto a = map_with(2, 3, {1.0, 0.0});
  try {
    train({a, a}, {GestureLabel::Thumb, GestureLabel::Thumb});
    FAIL("missing gestures accepted");
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("index") != std::string::npos);
    CHECK(msg.find("hand_closure") != std::string::npos);
    CHECK(msg.find("thumb") == std::string::npos);
  }
  CHECK_THROWS_AS(train({a, map_with(3, 3, {1, 1, 1})}, {GestureLabel::Thumb, GestureLabel::Thumb}, {}, 250.0,
                        {GestureLabel::Thumb}),
                  DomainError);
  const auto model = train({a, a}, {GestureLabel::Thumb, GestureLabel::Thumb}, {}, 250.0, {GestureLabel::Thumb});
  CHECK_THROWS_AS(classify(model, map_with(3, 3, {1, 1, 1})), DomainError);
}

TEST_CASE("separated synthetic classes are classified perfectly on training maps") {
  Rng rng(derive_seed(4, "separated"));
  std::vector<TmaMap> maps;
  std::vector<GestureLabel> labels;
  for (auto g : kActiveGestures) {
    for (int r = 0; r < 6; ++r) {
      std::vector<double> rows(5, 0.1);
      rows[index_of(g) - 1] = 1.0;
      for (double& v : rows) v += rng.uniform(-0.02, 0.02);
      maps.push_back(map_with(5, 20, rows));
      labels.push_back(g);
    }
  }
  const auto model = train(maps, labels);
  double max_intra = 0.0, min_inter = 1e300;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    max_intra = std::max(max_intra, frobenius_distance(maps[i].values, model.templates.at(labels[i])));
  }
  for (auto g : kActiveGestures) {
    for (auto h : kActiveGestures) {
      if (g != h) min_inter = std::min(min_inter, frobenius_distance(model.templates.at(g), model.templates.at(h)));
    }
  }
  REQUIRE(min_inter > 2 * max_intra);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto d = classify(model, maps[i]);
    CHECK(d.label == labels[i]);
    CHECK(d.label == nearest(model, maps[i]));
  }
}

TEST_CASE("common envelope scaling leaves the label alone") {
  const auto rec = synth::generate_corpus(small_corpus(1, 6)).front();
  const PipelineConfig cfg;
  const auto model = train_subject(rec, cfg);
  auto scaled = rec;
  for (auto& ch : scaled.channels) {
    for (float& v : ch) v *= 3.7f;
  }
  const auto a = extract_rep_maps(rec, cfg);
  const auto b = extract_rep_maps(scaled, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].map.has_value() == b[i].map.has_value());
    if (a[i].map) CHECK(classify(model, *a[i].map).label == classify(model, *b[i].map).label);
  }
}

TEST_CASE("model files round-trip") {
  const auto rec = synth::generate_corpus(small_corpus(1, 4)).front();
  const auto model = train_subject(rec);
  const auto bytes = serialize_model(model);
  const auto back = parse_model(bytes);
  CHECK(back.channels == model.channels);
  CHECK(back.samples == model.samples);
  CHECK(back.threshold == model.threshold);
  CHECK(back.subject_id == model.subject_id);
  for (const auto& [g, t] : model.templates) {
    const auto& u = back.templates.at(g);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(u[i] == static_cast<float>(t[i]));
  }
  CHECK(serialize_model(back) == bytes);

  auto cut = bytes;
  cut.pop_back();
  CHECK_THROWS_AS(parse_model(cut), FormatError);
  auto bad = bytes;
  bad[0] = 'x';
  CHECK_THROWS_AS(parse_model(bad), FormatError);
}

TEST_CASE("evaluation report") {
  auto spec = small_corpus(2, 6);
  const auto corpus = synth::generate_corpus(spec);
  const auto rep = evaluate(corpus);
  REQUIRE(rep.cells.size() == 5u);
  CHECK(rep.subjects == std::vector<std::string>{"A", "B"});
  double sum = 0;
  int n = 0;
  for (std::size_t g = 0; g < 5; ++g) {
    std::size_t row = 0;
    for (auto c : rep.confusion[g]) row += c;
    CHECK(row == rep.test_counts[g]);
    CHECK(rep.test_counts[g] == 6u);  // 3 test reps x 2 subjects
    double gsum = 0;
    for (const auto& c : rep.cells[g]) {
      REQUIRE(c.has_value());
      CHECK(*c >= 0.0);
      CHECK(*c <= 100.0);
      gsum += *c;
      sum += *c;
      ++n;
    }
    CHECK(*rep.gesture_average[g] == doctest::Approx(gsum / 2));
  }
  CHECK(rep.overall == doctest::Approx(sum / n));

  const auto text = report_text(rep);
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> first_words;
  while (std::getline(lines, line)) first_words.push_back(line.substr(0, line.find(' ')));
  CHECK(first_words == std::vector<std::string>{"Gesture", "Thumb", "Index", "Middle", "Ring", "Hand", "Avg"});
  CHECK(report_csv(rep).rfind("gesture,subject,accuracy_pct\n", 0) == 0);

  // determinism in the split seed
  const auto again = evaluate(corpus);
  CHECK(report_text(again) == text);
  CHECK_THROWS_AS(evaluate(corpus, PipelineConfig{}, SplitSpec{1.0, 1}), DomainError);
}

TEST_CASE("missing gestures render as empty cells") {
  auto spec = small_corpus(1, 4);
  spec.protocol.gestures = {GestureLabel::Thumb, GestureLabel::Index, GestureLabel::Middle, GestureLabel::Ring};
  const auto rep = evaluate(synth::generate_corpus(spec));
  CHECK_FALSE(rep.cells[4][0].has_value());
  CHECK(report_text(rep).find("--") != std::string::npos);
  CHECK(rep.test_counts[4] == 0u);
}

TEST_CASE("too few reps cannot be split") {
  const auto corpus = synth::generate_corpus(small_corpus(1, 2));
  CHECK_THROWS_AS(evaluate(corpus), DomainError);
}

TEST_CASE("paired models classify every rep") {
  const auto corpus = synth::generate_corpus(small_corpus(2, 4));
  std::vector<ClassifierModel> models;
  for (const auto& r : corpus) models.push_back(train_subject(r));
  const auto rep = evaluate_models(corpus, models);
  for (auto c : rep.test_counts) CHECK(c == 8u);
  CHECK(rep.overall >= 90.0);
  CHECK_THROWS_AS(evaluate_models(corpus, {models[0]}), DomainError);
}
