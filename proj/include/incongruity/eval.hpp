/*
 * Copyright 2026 The Incongruity Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Evaluation: P/R/F for the sarcastic class, exact threshold sweeps,
// stratified two-fold cross-validation and the oracle comparison.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "incongruity/common.hpp"
#include "incongruity/corpus.hpp"
#include "incongruity/detector.hpp"

namespace incongruity {

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  static Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    Metrics m{tp, fp, fn, tn};
    m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
  }

  std::size_t total() const { return tp + fp + fn + tn; }

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct Prediction {
  Label predicted = Label::non_sarcastic;
  Label gold = Label::non_sarcastic;
};

inline Metrics compute_metrics(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw Error("cannot compute metrics on no predictions");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& p : predictions) {
    if (p.gold == Label::unlabeled) throw Error("metrics require gold labels");
    const bool pos = p.predicted == Label::sarcastic;
    if (p.gold == Label::sarcastic)
      ++(pos ? tp : fn);
    else
      ++(pos ? fp : tn);
  }
  return Metrics::from_counts(tp, fp, fn, tn);
}

struct ScoredDocument {
  std::string id;
  double score = kInfinity;
  Label gold = Label::unlabeled;
};

struct SweepPoint {
  double threshold = 0.0;
  Metrics metrics;
};

struct SweepResult {
  std::vector<SweepPoint> evaluated;
  double best_threshold = 0.0;
  Metrics best_metrics;
};

/// Below-minimum, midpoints between consecutive distinct finite scores, and
/// above-maximum. Together they realize every achievable split of the scores.
inline std::vector<double> midpoint_candidates(std::span<const ScoredDocument> scores) {
  std::vector<double> finite;
  for (const auto& s : scores)
    if (std::isfinite(s.score)) finite.push_back(s.score);
  if (finite.empty()) throw Error("threshold sweep: no document has a finite score");
  std::sort(finite.begin(), finite.end());
  finite.erase(std::unique(finite.begin(), finite.end()), finite.end());
  std::vector<double> out;
  out.reserve(finite.size() + 1);
  out.push_back(finite.front() - kThresholdMargin);
  for (std::size_t i = 0; i + 1 < finite.size(); ++i) {
    const double a = finite[i], b = finite[i + 1];
    double mid = a + (b - a) / 2.0;
    if (!(mid > a)) mid = b;
    out.push_back(mid);
  }
  out.push_back(finite.back() + kThresholdMargin);
  return out;
}

/// Evaluates `candidates` (any order) and keeps the best f1; ties go to the
/// smallest threshold. `evaluated` is sorted by threshold.
inline SweepResult threshold_sweep(std::span<const ScoredDocument> scores,
                                   std::vector<double> candidates) {
  if (scores.empty()) throw Error("threshold sweep: no scores");
  if (candidates.empty()) throw Error("threshold sweep: no candidate thresholds");
  std::size_t positives = 0;
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) {
    if (s.gold == Label::unlabeled)
      throw Error("threshold sweep: document '" + s.id + "' is unlabeled");
    const bool sarcastic = s.gold == Label::sarcastic;
    positives += sarcastic;
    sorted.emplace_back(s.score, sarcastic);
  }
  std::sort(sorted.begin(), sorted.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  SweepResult result;
  std::size_t below = 0, tp = 0;
  bool first = true;
  for (double t : candidates) {
    while (below < sorted.size() && sorted[below].first < t) tp += sorted[below++].second;
    const std::size_t fp = below - tp;
    const std::size_t fn = positives - tp;
    const std::size_t tn = sorted.size() - below - fn;
    const Metrics m = Metrics::from_counts(tp, fp, fn, tn);
    result.evaluated.push_back({t, m});
    if (first || m.f1 > result.best_metrics.f1) {
      result.best_threshold = t;
      result.best_metrics = m;
      first = false;
    }
  }
  return result;
}

inline SweepResult threshold_sweep(std::span<const ScoredDocument> scores) {
  return threshold_sweep(scores, midpoint_candidates(scores));
}

inline std::vector<ScoredDocument> to_scored(const Dataset& ds,
                                             const std::vector<DetectionResult>& results) {
  std::vector<ScoredDocument> out;
  out.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i)
    out.push_back({ds.documents[i].id(), results[i].score, ds.documents[i].label()});
  return out;
}

// ---------------------------------------------------------------------------
// Two-fold cross-validation

struct Fold {
  int train_split = 0;
  int test_split = 1;
  double threshold = 0.0;
  Metrics train_metrics;
  Metrics test_metrics;
  std::vector<std::string> test_ids;
};

struct FoldReport {
  std::uint64_t seed = 0;
  std::array<Fold, 2> folds;
  Metrics pooled;
};

/// Indices into `scores` for each of the two splits: a seeded shuffle within
/// each class, then alternating assignment continued across classes.
inline std::array<std::vector<std::size_t>, 2> stratified_halves(
    std::span<const ScoredDocument> scores, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].gold == Label::sarcastic)
      pos.push_back(i);
    else if (scores[i].gold == Label::non_sarcastic)
      neg.push_back(i);
    else
      throw Error("cross-validation: document '" + scores[i].id + "' is unlabeled");
  }
  std::mt19937_64 rng(seed);
  detail::seeded_shuffle(pos, rng);
  detail::seeded_shuffle(neg, rng);
  std::array<std::vector<std::size_t>, 2> halves;
  std::size_t turn = 0;
  for (const auto* cls : {&pos, &neg})
    for (std::size_t i : *cls) halves[turn++ % 2].push_back(i);
  for (auto& h : halves) std::sort(h.begin(), h.end());
  for (int s = 0; s < 2; ++s) {
    bool has_pos = false, has_neg = false;
    for (std::size_t i : halves[s]) (scores[i].gold == Label::sarcastic ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
      throw Error("cross-validation: split " + std::to_string(s) + " lacks a " +
                  (has_pos ? "non_sarcastic" : "sarcastic") + " document");
  }
  return halves;
}

inline FoldReport two_fold_cv(std::span<const ScoredDocument> scores, std::uint64_t seed) {
  if (scores.size() < 2) throw Error("cross-validation needs at least two documents");
  auto halves = stratified_halves(scores, seed);
  FoldReport report;
  report.seed = seed;
  std::vector<Prediction> pooled;
  for (int f = 0; f < 2; ++f) {
    Fold& fold = report.folds[f];
    fold.train_split = f;
    fold.test_split = 1 - f;
    std::vector<ScoredDocument> train, test;
    for (std::size_t i : halves[fold.train_split]) train.push_back(scores[i]);
    for (std::size_t i : halves[fold.test_split]) test.push_back(scores[i]);
    SweepResult sweep;
    try {
      sweep = threshold_sweep(train);
    } catch (const Error& e) {
      throw Error("cross-validation fold " + std::to_string(f) + ": " + e.what());
    }
    fold.threshold = sweep.best_threshold;
    fold.train_metrics = sweep.best_metrics;
    std::vector<Prediction> preds;
    for (const auto& d : test) {
      preds.push_back({classify(d.score, fold.threshold), d.gold});
      fold.test_ids.push_back(d.id);
    }
    std::sort(fold.test_ids.begin(), fold.test_ids.end());
    fold.test_metrics = compute_metrics(preds);
    pooled.insert(pooled.end(), preds.begin(), preds.end());
  }
  report.pooled = compute_metrics(pooled);
  return report;
}

inline FoldReport two_fold_cv(const Dataset& ds, const DetectionConfig& config,
                              const Resources& res, std::uint64_t seed, unsigned jobs = 1) {
  auto scored = to_scored(ds, score_dataset(ds, config, res, jobs));
  return two_fold_cv(scored, seed);
}

// ---------------------------------------------------------------------------
// Oracle comparison

struct OracleComparison {
  SweepResult all_words;
  SweepResult exact_word;
};

/// Sweeps the all-words and exact-word approaches on the same resources.
/// Sarcastic documents must carry a gold word; non-sarcastic documents
/// without one are scored with all-words in the exact-word run.
inline OracleComparison oracle_comparison(const Dataset& ds, const DetectionConfig& config,
                                          const Resources& res, unsigned jobs = 1) {
  for (const auto& d : ds.documents)
    if (d.label() == Label::sarcastic && !d.gold_incongruous())
      throw Error("oracle comparison: sarcastic document '" + d.id() +
                  "' has no annotated incongruous word");
  DetectionConfig all = config;
  all.approach = Approach::all_words;
  auto all_results = score_dataset(ds, all, res, jobs);

  DetectionConfig exact = config;
  exact.approach = Approach::exact_word;
  Dataset annotated;
  for (const auto& d : ds.documents)
    if (d.gold_incongruous()) annotated.documents.push_back(d);
  auto exact_results = score_dataset(annotated, exact, res, jobs);
  std::vector<DetectionResult> merged(ds.documents.size());
  std::size_t ai = 0;
  for (std::size_t i = 0; i < ds.documents.size(); ++i)
    merged[i] = ds.documents[i].gold_incongruous() ? exact_results[ai++] : all_results[i];

  OracleComparison out;
  out.all_words = threshold_sweep(to_scored(ds, all_results));
  out.exact_word = threshold_sweep(to_scored(ds, merged));
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const Metrics& m) {
  return {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn},
          {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const SweepResult& s) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : s.evaluated)
    curve.push_back({{"threshold", p.threshold}, {"metrics", to_json(p.metrics)}});
  return {{"best_threshold", s.best_threshold},
          {"best_metrics", to_json(s.best_metrics)},
          {"evaluated", std::move(curve)}};
}

inline nlohmann::json to_json(const FoldReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"train_split", f.train_split},
                     {"test_split", f.test_split},
                     {"threshold", f.threshold},
                     {"train_metrics", to_json(f.train_metrics)},
                     {"test_metrics", to_json(f.test_metrics)},
                     {"test_ids", f.test_ids}});
  return {{"seed", r.seed}, {"folds", std::move(folds)}, {"pooled", to_json(r.pooled)}};
}

inline nlohmann::json to_json(const OracleComparison& c) {
  return {{"all_words", to_json(c.all_words)}, {"exact_word", to_json(c.exact_word)}};
}

/// Canonical JSON text: sorted keys, two-space indent, trailing newline.
inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct TableRow {
  std::string name;
  std::string threshold;
  Metrics metrics;
};

/// Plain-text table in the "Similarity  T  P  R  F" layout, P/R/F in percent.
inline std::string format_table(std::string_view first_column, const std::vector<TableRow>& rows) {
  std::size_t w0 = first_column.size(), w1 = 1;
  for (const auto& r : rows) {
    w0 = std::max(w0, r.name.size());
    w1 = std::max(w1, r.threshold.size());
  }
  auto line = [&](std::string_view a, std::string_view b, std::string_view p, std::string_view r,
                  std::string_view f) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%-*.*s  %*.*s  %7.*s  %7.*s  %7.*s\n", int(w0), int(a.size()),
                  a.data(), int(w1), int(b.size()), b.data(), int(p.size()), p.data(),
                  int(r.size()), r.data(), int(f.size()), f.data());
    return std::string(buf);
  };
  auto pct = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * x);
    return std::string(buf);
  };
  std::string out = line(first_column, "T", "P", "R", "F");
  for (const auto& r : rows)
    out += line(r.name, r.threshold, pct(r.metrics.precision), pct(r.metrics.recall),
                pct(r.metrics.f1));
  return out;
}

inline std::string format_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", t);
  return buf;
}

/// "threshold,precision,recall,f1" rows for plotting a sweep curve.
inline std::string sweep_csv(const SweepResult& s) {
  std::string out = "threshold,precision,recall,f1\n";
  for (const auto& p : s.evaluated)
    out += detail::format_double(p.threshold) + "," + detail::format_double(p.metrics.precision) +
           "," + detail::format_double(p.metrics.recall) + "," +
           detail::format_double(p.metrics.f1) + "\n";
  return out;
}

}  // namespace incongruity
