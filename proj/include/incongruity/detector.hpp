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

// Incongruity scoring. At each candidate position the completer proposes the
// word it expects there; the document score is the minimum similarity
// between expected and observed words, and the document is flagged sarcastic
// when that minimum falls below the threshold.
//
// Candidate positions:
//   all_words         every content word
//   incongruous_only  the content words whose average similarity to the
//                     other content words is at or below the median
//   exact_word        the annotated incongruous word only

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "incongruity/common.hpp"
#include "incongruity/completion.hpp"
#include "incongruity/corpus.hpp"
#include "incongruity/similarity.hpp"

namespace incongruity {

enum class Approach { all_words, incongruous_only, exact_word };

inline std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::all_words:
      return "all-words";
    case Approach::incongruous_only:
      return "incongruous-only";
    case Approach::exact_word:
      break;
  }
  return "exact-word";
}

inline std::optional<Approach> parse_approach(std::string_view s) {
  if (s == "all-words" || s == "all_words") return Approach::all_words;
  if (s == "incongruous-only" || s == "incongruous_only") return Approach::incongruous_only;
  if (s == "exact-word" || s == "exact_word") return Approach::exact_word;
  return std::nullopt;
}

/// Sweep thresholds may sit this far outside a backend's value range (the
/// "everything sarcastic" / "nothing sarcastic" cut points).
inline constexpr double kThresholdMargin = 0.01;

struct DetectionConfig {
  double threshold = 0.0;
  Approach approach = Approach::all_words;
  std::string similarity = "embedding";
  std::string completer = "ngram";
  std::string selection_similarity = "embedding";

  /// Throws unless the threshold is finite and within `range` widened by
  /// kThresholdMargin.
  void validate(std::pair<double, double> range) const {
    if (!std::isfinite(threshold)) throw Error("threshold must be finite");
    if (threshold < range.first - kThresholdMargin ||
        threshold > range.second + kThresholdMargin)
      throw Error("threshold " + detail::format_double(threshold) + " outside [" +
                  detail::format_double(range.first) + ", " +
                  detail::format_double(range.second) + "] for backend '" + similarity + "'");
  }
};

/// Shared read-only resources a detector needs. When `selection_similarity`
/// is null, selection uses `similarity`.
struct Resources {
  const FunctionWordLexicon& function_words;
  const Completer& completer;
  const WordSimilarity& similarity;
  const WordSimilarity* selection_similarity = nullptr;

  const WordSimilarity& selection() const {
    return selection_similarity ? *selection_similarity : similarity;
  }
};

struct PositionEvidence {
  std::size_t position = 0;
  std::optional<std::string> expected;
  std::string observed;
  std::optional<double> similarity;

  friend bool operator==(const PositionEvidence&, const PositionEvidence&) = default;
};

struct DetectionResult {
  std::string document_id;
  double score = kInfinity;
  std::optional<PositionEvidence> argmin;
  std::vector<PositionEvidence> evidence;
  Label predicted = Label::non_sarcastic;

  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

/// Strict: a score equal to the threshold is non-sarcastic.
inline Label classify(double score, double threshold) {
  return score < threshold ? Label::sarcastic : Label::non_sarcastic;
}

namespace detail {

inline DetectionResult score_positions(const Document& doc,
                                       const std::vector<std::size_t>& positions,
                                       double threshold, const Resources& res) {
  DetectionResult result;
  result.document_id = doc.id();
  const auto& surfaces = doc.surfaces();
  std::optional<std::size_t> best;
  for (std::size_t p : positions) {
    PositionEvidence ev;
    ev.position = p;
    ev.observed = surfaces[p];
    ev.expected = res.completer.complete(CompletionQuery{surfaces, p});
    if (ev.expected) ev.similarity = res.similarity.similarity(*ev.expected, ev.observed);
    if (ev.similarity && *ev.similarity < result.score) {
      result.score = *ev.similarity;
      best = result.evidence.size();
    }
    result.evidence.push_back(std::move(ev));
  }
  if (best) result.argmin = result.evidence[*best];
  result.predicted = classify(result.score, threshold);
  return result;
}

}  // namespace detail

inline DetectionResult score_all_words(const Document& doc, const DetectionConfig& config,
                                       const Resources& res) {
  return detail::score_positions(doc, content_positions(doc, res.function_words),
                                 config.threshold, res);
}

/// Mean similarity of each content word to every other content word, in
/// content-position order. Undefined pairs are left out of the mean; a
/// position with no defined pair averages to +inf.
inline std::vector<double> incongruity_averages(const Document& doc,
                                                const std::vector<std::size_t>& positions,
                                                const WordSimilarity& sim) {
  const auto& s = doc.surfaces();
  std::vector<double> averages;
  averages.reserve(positions.size());
  std::vector<double> values;
  for (std::size_t p : positions) {
    values.clear();
    for (std::size_t i : positions) {
      if (i == p) continue;
      if (auto v = sim.similarity(s[i], s[p])) values.push_back(*v);
    }
    // Summed in sorted order so repeated words get bit-identical averages.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    averages.push_back(values.empty() ? kInfinity : sum / static_cast<double>(values.size()));
  }
  return averages;
}

/// Positions whose average is at or below the k-th smallest average, with
/// k = ceil(n/2). Positions with no defined average are selected only when
/// every position is in that state.
inline std::vector<std::size_t> select_from_averages(const std::vector<std::size_t>& positions,
                                                     const std::vector<double>& averages) {
  if (positions.empty()) return {};
  if (std::all_of(averages.begin(), averages.end(), [](double a) { return std::isinf(a); }))
    return positions;
  std::vector<double> sorted = averages;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[(positions.size() + 1) / 2 - 1];
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (std::isfinite(averages[i]) && averages[i] <= cut) selected.push_back(positions[i]);
  return selected;
}

inline std::vector<std::size_t> select_incongruous(const Document& doc, const DetectionConfig&,
                                                   const Resources& res) {
  auto positions = content_positions(doc, res.function_words);
  return select_from_averages(positions, incongruity_averages(doc, positions, res.selection()));
}

inline DetectionResult score_incongruous_only(const Document& doc, const DetectionConfig& config,
                                              const Resources& res) {
  return detail::score_positions(doc, select_incongruous(doc, config, res), config.threshold,
                                 res);
}

inline DetectionResult score_exact_word(const Document& doc, const DetectionConfig& config,
                                        const Resources& res) {
  if (!doc.gold_incongruous())
    throw Error("document '" + doc.id() + "' has no annotated incongruous word");
  return detail::score_positions(doc, {*doc.gold_incongruous()}, config.threshold, res);
}

inline DetectionResult score(const Document& doc, const DetectionConfig& config,
                             const Resources& res) {
  switch (config.approach) {
    case Approach::all_words:
      return score_all_words(doc, config, res);
    case Approach::incongruous_only:
      return score_incongruous_only(doc, config, res);
    case Approach::exact_word:
      break;
  }
  return score_exact_word(doc, config, res);
}

/// Scores every document, in dataset order, on up to `jobs` threads.
inline std::vector<DetectionResult> score_dataset(const Dataset& ds, const DetectionConfig& config,
                                                  const Resources& res, unsigned jobs = 1) {
  const std::size_t n = ds.documents.size();
  std::vector<DetectionResult> results(n);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = score(ds.documents[i], config, res);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = score(ds.documents[i], config, res);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const PositionEvidence& ev) {
  nlohmann::json j;
  j["position"] = ev.position;
  j["observed"] = ev.observed;
  j["expected"] = ev.expected ? nlohmann::json(*ev.expected) : nlohmann::json(nullptr);
  j["similarity"] = ev.similarity ? nlohmann::json(*ev.similarity) : nlohmann::json(nullptr);
  return j;
}

/// An infinite score (nothing scorable) is written as null.
inline nlohmann::json to_json(const DetectionResult& r) {
  nlohmann::json j;
  j["id"] = r.document_id;
  j["score"] = std::isfinite(r.score) ? nlohmann::json(r.score) : nlohmann::json(nullptr);
  j["predicted"] = std::string(to_string(r.predicted));
  if (r.argmin) {
    j["argmin_position"] = r.argmin->position;
    j["expected"] = r.argmin->expected ? nlohmann::json(*r.argmin->expected) : nlohmann::json(nullptr);
    j["observed"] = r.argmin->observed;
  } else {
    j["argmin_position"] = nullptr;
    j["expected"] = nullptr;
    j["observed"] = nullptr;
  }
  j["evidence"] = nlohmann::json::array();
  for (const auto& ev : r.evidence) j["evidence"].push_back(to_json(ev));
  return j;
}

}  // namespace incongruity
