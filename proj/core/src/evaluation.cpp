#include "semg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "semg/errors.hpp"
#include "semg/rng.hpp"

namespace semg::pipeline {
namespace {

// Onsets up to this long before the labeled hold still count for that rep:
// the zero-phase envelope starts rising slightly ahead of the activation.
constexpr double kEarlyOnsetTolerance = 1.0;  // s

struct SubjectOutcome {
  std::string subject;
  std::array<std::size_t, kGestureCount> correct{};
  std::array<std::size_t, kGestureCount> total{};
  std::array<std::array<std::size_t, kGestureCount>, kGestureCount> confusion{};
};

std::vector<std::vector<double>> as_double(const ingest::Recording& rec) {
  std::vector<std::vector<double>> out;
  out.reserve(rec.channels.size());
  for (const auto& ch : rec.channels) out.emplace_back(ch.begin(), ch.end());
  return out;
}

void record(SubjectOutcome& o, GestureLabel truth, GestureLabel predicted) {
  ++o.total[index_of(truth)];
  if (truth == predicted) ++o.correct[index_of(truth)];
  ++o.confusion[index_of(truth)][index_of(predicted)];
}

std::vector<TmaMap> maps_of(const std::vector<const RepMap*>& reps, std::vector<GestureLabel>& labels) {
  std::vector<TmaMap> maps;
  for (const auto* r : reps) {
    const auto& m = r->map ? r->map : r->labeled_map;
    if (!m) continue;
    maps.push_back(*m);
    labels.push_back(r->gesture);
  }
  return maps;
}

std::vector<GestureLabel> gestures_in(const std::vector<RepMap>& reps) {
  std::vector<GestureLabel> g;
  for (const auto& r : reps) {
    if (std::find(g.begin(), g.end(), r.gesture) == g.end()) g.push_back(r.gesture);
  }
  std::sort(g.begin(), g.end());
  return g;
}

SubjectOutcome evaluate_subject(const ingest::Recording& rec, const PipelineConfig& config,
                                const SplitSpec& split) {
  SubjectOutcome out;
  out.subject = rec.header.subject_id;
  const auto reps = extract_rep_maps(rec, config);
  const auto gestures = gestures_in(reps);

  std::vector<const RepMap*> train_set, test_set;
  for (auto g : gestures) {
    std::vector<const RepMap*> of_g;
    for (const auto& r : reps) {
      if (r.gesture == g) of_g.push_back(&r);
    }
    Rng rng(derive_seed(split.seed, "split:" + rec.header.subject_id, index_of(g)));
    for (std::size_t i = of_g.size(); i > 1; --i) {
      std::swap(of_g[i - 1], of_g[rng.next_u64() % i]);
    }
    const auto n_train =
        static_cast<std::size_t>(std::llround(split.train_fraction * static_cast<double>(of_g.size())));
    if (n_train < 2 || n_train >= of_g.size()) {
      throw DomainError("subject " + rec.header.subject_id + ": " + std::to_string(of_g.size()) + " " +
                        std::string(name_of(g)) + " reps cannot be split into >= 2 train and >= 1 test");
    }
    train_set.insert(train_set.end(), of_g.begin(), of_g.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_set.insert(test_set.end(), of_g.begin() + static_cast<std::ptrdiff_t>(n_train), of_g.end());
  }

  std::vector<GestureLabel> labels;
  const auto maps = maps_of(train_set, labels);
  auto model = train(maps, labels, config, rec.sample_rate(), gestures);
  model.subject_id = rec.header.subject_id;
  for (const auto* r : test_set) {
    record(out, r->gesture, r->map ? classify(model, *r->map).label : GestureLabel::Neutral);
  }
  return out;
}

EvaluationReport build_report(const std::vector<SubjectOutcome>& outcomes) {
  EvaluationReport rep;
  const std::size_t ng = rep.gestures.size();
  rep.cells.assign(ng, std::vector<std::optional<double>>(outcomes.size()));
  rep.gesture_average.assign(ng, std::nullopt);
  rep.confusion.assign(ng, {});
  rep.test_counts.assign(ng, 0);
  double all_sum = 0.0;
  std::size_t all_n = 0;
  std::vector<double> subj_sum(outcomes.size(), 0.0);
  std::vector<std::size_t> subj_n(outcomes.size(), 0);
  for (std::size_t gi = 0; gi < ng; ++gi) {
    const auto g = index_of(rep.gestures[gi]);
    double row_sum = 0.0;
    std::size_t row_n = 0;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
      const auto& o = outcomes[s];
      rep.test_counts[gi] += o.total[g];
      for (std::size_t p = 0; p < kGestureCount; ++p) rep.confusion[gi][p] += o.confusion[g][p];
      if (o.total[g] == 0) continue;
      const double acc = 100.0 * static_cast<double>(o.correct[g]) / static_cast<double>(o.total[g]);
      rep.cells[gi][s] = acc;
      row_sum += acc;
      ++row_n;
      subj_sum[s] += acc;
      ++subj_n[s];
      all_sum += acc;
      ++all_n;
    }
    if (row_n > 0) rep.gesture_average[gi] = row_sum / static_cast<double>(row_n);
  }
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    rep.subjects.push_back(outcomes[s].subject);
    rep.subject_average.push_back(subj_n[s] > 0 ? std::optional<double>(subj_sum[s] / static_cast<double>(subj_n[s]))
                                                : std::nullopt);
  }
  rep.overall = all_n > 0 ? all_sum / static_cast<double>(all_n) : 0.0;
  return rep;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "--";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

std::string rpad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

}  // namespace

std::vector<RepMap> extract_rep_maps(const ingest::Recording& rec, const PipelineConfig& config) {
  rec.validate();
  const double fs = rec.sample_rate();
  config.validate(fs);
  const auto env = channel_envelopes(as_double(rec), fs, config.filter, config.envelope, config.phase);

  std::vector<bool> rest(rec.samples());
  bool any_rest = false;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    rest[i] = rec.labels[i] == GestureLabel::Neutral;
    any_rest = any_rest || rest[i];
  }
  std::optional<double> initial;
  if (any_rest) initial = rest_baseline(env, rest);
  const auto onsets = detect_onsets(env, fs, config.onset, initial);

  const auto len = static_cast<std::size_t>(std::llround(config.window * fs));
  const auto early = static_cast<std::size_t>(std::llround(kEarlyOnsetTolerance * fs));
  std::array<int, kGestureCount> count{};
  std::vector<RepMap> reps;
  const std::size_t n = rec.samples();
  for (std::size_t i = 0; i < n;) {
    const auto g = rec.labels[i];
    std::size_t end = i;
    while (end < n && rec.labels[end] == g) ++end;
    if (g != GestureLabel::Neutral) {
      RepMap r;
      r.gesture = g;
      r.rep = count[index_of(g)]++;
      r.hold_start = i;
      const std::size_t from = i > early ? i - early : 0;
      auto it = std::lower_bound(onsets.begin(), onsets.end(), from);
      if (it != onsets.end() && *it < end && *it + len <= n) {
        r.onset = *it;
        r.map = tma_map(env, *it, fs, config.window);
      }
      if (i + len <= n) r.labeled_map = tma_map(env, i, fs, config.window);
      reps.push_back(std::move(r));
    }
    i = end;
  }
  return reps;
}

ClassifierModel train_subject(const ingest::Recording& rec, const PipelineConfig& config,
                              const std::vector<GestureLabel>& expected) {
  const auto reps = extract_rep_maps(rec, config);
  std::vector<const RepMap*> all;
  for (const auto& r : reps) all.push_back(&r);
  std::vector<GestureLabel> labels;
  const auto maps = maps_of(all, labels);
  auto model = train(maps, labels, config, rec.sample_rate(), expected.empty() ? gestures_in(reps) : expected);
  model.subject_id = rec.header.subject_id;
  return model;
}

EvaluationReport evaluate(const std::vector<ingest::Recording>& recordings,
                          const PipelineConfig& config, const SplitSpec& split) {
  if (recordings.empty()) throw DomainError("no recordings to evaluate");
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
    throw DomainError("train fraction must lie in (0, 1)");
  }
  std::vector<std::future<SubjectOutcome>> jobs;
  for (const auto& rec : recordings) {
    jobs.push_back(std::async(std::launch::async, [&rec, &config, &split] {
      return evaluate_subject(rec, config, split);
    }));
  }
  std::vector<SubjectOutcome> outcomes;
  for (auto& j : jobs) outcomes.push_back(j.get());
  auto rep = build_report(outcomes);
  rep.phase = config.phase;
  rep.split_seed = split.seed;
  return rep;
}

EvaluationReport evaluate_models(const std::vector<ingest::Recording>& recordings,
                                 const std::vector<ClassifierModel>& models) {
  if (recordings.size() != models.size()) throw DomainError("one model per recording required");
  if (recordings.empty()) throw DomainError("no recordings to evaluate");
  std::vector<SubjectOutcome> outcomes;
  for (std::size_t s = 0; s < recordings.size(); ++s) {
    SubjectOutcome o;
    o.subject = recordings[s].header.subject_id;
    for (const auto& r : extract_rep_maps(recordings[s], models[s].config)) {
      record(o, r.gesture, r.map ? classify(models[s], *r.map).label : GestureLabel::Neutral);
    }
    outcomes.push_back(o);
  }
  auto rep = build_report(outcomes);
  rep.phase = models.front().config.phase;
  return rep;
}

std::string report_text(const EvaluationReport& r) {
  std::ostringstream os;
  os << rpad("Gesture", 10);
  for (const auto& s : r.subjects) os << lpad(s, 8);
  os << lpad("Avg", 8) << '\n';
  for (std::size_t g = 0; g < r.gestures.size(); ++g) {
    os << rpad(std::string(table_caption(r.gestures[g])), 10);
    for (std::size_t s = 0; s < r.subjects.size(); ++s) os << lpad(cell(r.cells[g][s]), 8);
    os << lpad(cell(r.gesture_average[g]), 8) << '\n';
  }
  os << rpad("Avg", 10);
  for (const auto& a : r.subject_average) os << lpad(cell(a), 8);
  os << lpad(cell(r.overall), 8) << '\n';
  return os.str();
}

std::string report_csv(const EvaluationReport& r) {
  std::ostringstream os;
  os << "gesture,subject,accuracy_pct\n";
  for (std::size_t g = 0; g < r.gestures.size(); ++g) {
    const std::string name(name_of(r.gestures[g]));
    for (std::size_t s = 0; s < r.subjects.size(); ++s) {
      os << name << ',' << r.subjects[s] << ',' << (r.cells[g][s] ? cell(r.cells[g][s]) : "") << '\n';
    }
    os << name << ",avg," << (r.gesture_average[g] ? cell(r.gesture_average[g]) : "") << '\n';
  }
  os << "all,avg," << cell(r.overall) << '\n';
  return os.str();
}

std::string confusion_text(const EvaluationReport& r) {
  std::ostringstream os;
  os << rpad("true\\pred", 10);
  for (std::size_t p = 0; p < kGestureCount; ++p) {
    os << lpad(std::string(table_caption(static_cast<GestureLabel>(p))), 9);
  }
  os << lpad("n", 6) << '\n';
  for (std::size_t g = 0; g < r.gestures.size(); ++g) {
    os << rpad(std::string(table_caption(r.gestures[g])), 10);
    for (std::size_t p = 0; p < kGestureCount; ++p) os << lpad(std::to_string(r.confusion[g][p]), 9);
    os << lpad(std::to_string(r.test_counts[g]), 6) << '\n';
  }
  return os.str();
}

}  // namespace semg::pipeline
