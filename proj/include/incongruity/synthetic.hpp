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

// Planted-incongruity benchmark over a closed vocabulary.
//
// Each template has one slot filled from a word cluster. Non-sarcastic
// sentences use a word of the slot's own cluster; sarcastic sentences plant a
// word from the paired "opposite" cluster, chosen so its fixture similarity to
// every natural slot word is below kPlantedMaxSimilarity. The training corpus
// holds natural sentences only, and one natural word per template is kept out
// of it so that benchmark sentences are not all verbatim training lines.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "incongruity/common.hpp"
#include "incongruity/completion.hpp"
#include "incongruity/corpus.hpp"
#include "incongruity/similarity.hpp"

namespace incongruity::synthetic {

inline constexpr double kPlantedMaxSimilarity = 0.3;
inline constexpr std::size_t kDimension = 64;

struct Cluster {
  std::string name;
  std::string category;
  std::vector<std::string> words;
};

struct Template {
  std::string text;  // "{}" marks the slot
  std::size_t cluster;
  std::size_t opposite;
};

inline const std::vector<Cluster>& clusters() {
  static const std::vector<Cluster> kClusters = {
      {"joy", "feeling", {"happy", "glad", "cheerful", "delighted"}},
      {"sorrow", "feeling", {"sad", "gloomy", "miserable", "unhappy"}},
      {"praise", "treatment", {"praised", "admired", "appreciated", "thanked"}},
      {"neglect", "treatment", {"ignored", "forgotten", "snubbed", "overlooked"}},
      {"wellness", "health", {"healthy", "rested", "energetic", "refreshed"}},
      {"illness", "health", {"sick", "feverish", "exhausted", "injured"}},
      {"journey", "travel", {"trip", "vacation", "holiday", "getaway"}},
      {"delay", "travel", {"delays", "cancellations", "layovers", "detours"}},
      {"fair", "weather", {"sunny", "warm", "clear", "pleasant"}},
      {"foul", "weather", {"rainy", "freezing", "stormy", "muddy"}},
      {"tasty", "food", {"delicious", "tasty", "fresh", "yummy"}},
      {"spoiled", "food", {"burnt", "soggy", "stale", "rotten"}},
      {"success", "career", {"promotion", "raise", "bonus", "award"}},
      {"failure", "career", {"layoff", "demotion", "reprimand", "paycut"}},
  };
  return kClusters;
}

inline const std::vector<Template>& templates() {
  static const std::vector<Template> kTemplates = {
      {"I love being {} at work!", 2, 3},
      {"Nothing makes me feel more {} than my friends.", 0, 1},
      {"So {} after a long night of sleep", 4, 5},
      {"Cannot wait for my {} next week", 6, 7},
      {"What a {} day for a picnic", 8, 9},
      {"The chef made the most {} dinner tonight.", 10, 11},
      {"My boss just gave me a {} today", 12, 13},
      {"I feel so {} when my phone rings at dawn", 0, 1},
      {"My neighbors always leave me {}", 2, 3},
      {"Spent the whole weekend feeling {}", 4, 5},
      {"The airline promised a smooth {} home", 6, 7},
      {"Perfect {} weather for the beach", 8, 9},
      {"Grandma baked a {} pie for everyone", 10, 11},
      {"Got a surprise {} from the company", 12, 13},
  };
  return kTemplates;
}

inline const std::vector<std::string>& function_words() {
  static const std::vector<std::string> kWords = {
      "a",    "after", "always", "at",   "being", "for",  "from", "i",   "just",
      "me",   "more",  "most",   "my",   "of",    "so",   "than", "the", "today",
      "what", "when",  "whole",  "next", "made",  "make", "is",   "it",  "to"};
  return kWords;
}

inline const std::vector<std::pair<std::string, std::string>>& antonym_pairs() {
  static const std::vector<std::pair<std::string, std::string>> kPairs = {
      {"happy", "sad"},       {"praised", "ignored"},  {"healthy", "sick"},
      {"sunny", "rainy"},     {"fresh", "stale"},      {"promotion", "demotion"},
      {"cheerful", "gloomy"}, {"rested", "exhausted"}, {"warm", "freezing"},
  };
  return kPairs;
}

struct SyntheticDocument {
  std::string id;
  std::string text;
  Label label = Label::non_sarcastic;
  std::string incongruous_word;
};

struct Benchmark {
  std::vector<SyntheticDocument> documents;
  std::vector<std::vector<std::string>> corpus;
  std::map<std::string, std::vector<double>> embeddings;

  std::string dataset_jsonl() const;
  std::string corpus_text() const;
  std::string embeddings_text() const;
  std::string function_words_text() const;
  std::string antonyms_text() const;
  std::string taxonomy_edges_text() const;
  std::string taxonomy_lemmas_text() const;

  /// File name to contents, as written by `gen-synthetic`.
  std::map<std::string, std::string> files() const {
    return {{"data.jsonl", dataset_jsonl()},
            {"corpus.txt", corpus_text()},
            {"embeddings.txt", embeddings_text()},
            {"function_words.txt", function_words_text()},
            {"antonyms.tsv", antonyms_text()},
            {"taxonomy_edges.tsv", taxonomy_edges_text()},
            {"taxonomy_lemmas.tsv", taxonomy_lemmas_text()}};
  }
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(incongruity::detail::bounded(rng, n));
}

inline std::string fill(const std::string& text, const std::string& word) {
  std::string out = text;
  out.replace(out.find("{}"), 2, word);
  return out;
}

inline std::vector<std::string> surfaces(const std::string& text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.surface));
  return out;
}

inline std::set<std::string> carrier_words() {
  std::set<std::string> fw(function_words().begin(), function_words().end());
  std::set<std::string> out;
  for (const auto& t : templates())
    for (const auto& w : surfaces(fill(t.text, "x")))
      if (w != "x" && !fw.count(w)) out.insert(w);
  return out;
}

}  // namespace detail

/// `count` documents, round(count * sarcastic_fraction) of them sarcastic.
inline Benchmark generate(std::uint64_t seed, std::size_t count = 500,
                          double sarcastic_fraction = 0.3) {
  if (count < 2) throw Error("synthetic benchmark needs at least two documents");
  if (!(sarcastic_fraction > 0.0 && sarcastic_fraction < 1.0))
    throw Error("sarcastic fraction must lie strictly between 0 and 1");
  std::mt19937_64 rng(seed);
  Benchmark bench;
  const auto& cl = clusters();

  // Cluster words share a dedicated axis plus a small private perturbation;
  // carrier words get independent random directions.
  auto noise = [&](double scale) {
    std::vector<double> v(kDimension);
    double norm = 0.0;
    for (double& x : v) {
      x = 2.0 * detail::uniform01(rng) - 1.0;
      norm += x * x;
    }
    for (double& x : v) x *= scale / std::sqrt(norm);
    return v;
  };
  for (std::size_t c = 0; c < cl.size(); ++c) {
    for (const auto& w : cl[c].words) {
      auto v = noise(0.35);
      v[c] += 1.0;
      bench.embeddings[w] = std::move(v);
    }
  }
  for (const auto& w : detail::carrier_words()) bench.embeddings[w] = noise(1.0);

  auto sim = [&](const std::string& a, const std::string& b) {
    return cosine_similarity(bench.embeddings.at(a), bench.embeddings.at(b));
  };

  // Training corpus: each template with three of its four natural words,
  // each repeated 1-4 times.
  const auto& tpls = templates();
  for (const auto& t : tpls) {
    const auto& words = cl[t.cluster].words;
    std::size_t held_out = detail::pick(rng, words.size());
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w == held_out) continue;
      std::size_t reps = 1 + detail::pick(rng, 4);
      for (std::size_t r = 0; r < reps; ++r)
        bench.corpus.push_back(detail::surfaces(detail::fill(t.text, words[w])));
    }
  }

  const std::size_t n_sarcastic =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(count * sarcastic_fraction)));
  std::vector<char> sarcastic(count, 0);
  for (std::size_t i = 0; i < n_sarcastic && i < count; ++i) sarcastic[i] = 1;
  incongruity::detail::seeded_shuffle(sarcastic, rng);

  for (std::size_t i = 0; i < count; ++i) {
    const Template& t = tpls[detail::pick(rng, tpls.size())];
    SyntheticDocument doc;
    char id[32];
    std::snprintf(id, sizeof(id), "syn-%04zu", i);
    doc.id = id;
    const auto& natural = cl[t.cluster].words;
    if (sarcastic[i]) {
      std::vector<std::string> planted;
      for (const auto& w : cl[t.opposite].words) {
        bool low = true;
        for (const auto& n : natural) low = low && sim(w, n) < kPlantedMaxSimilarity;
        if (low) planted.push_back(w);
      }
      if (planted.empty()) throw Error("synthetic: no low-similarity word for cluster " + cl[t.opposite].name);
      doc.incongruous_word = planted[detail::pick(rng, planted.size())];
      doc.label = Label::sarcastic;
    } else {
      doc.incongruous_word = natural[detail::pick(rng, natural.size())];
      doc.label = Label::non_sarcastic;
    }
    doc.text = detail::fill(t.text, doc.incongruous_word);
    bench.documents.push_back(std::move(doc));
  }
  return bench;
}

inline std::string Benchmark::dataset_jsonl() const {
  std::string out;
  for (const auto& d : documents) {
    nlohmann::json j = {{"id", d.id},
                        {"text", d.text},
                        {"label", std::string(to_string(d.label))},
                        {"incongruous_word", d.incongruous_word}};
    out += j.dump() + "\n";
  }
  return out;
}

inline std::string Benchmark::corpus_text() const {
  std::string out;
  for (const auto& s : corpus) out += incongruity::detail::join(s, " ") + "\n";
  return out;
}

inline std::string Benchmark::embeddings_text() const {
  std::string out = std::to_string(embeddings.size()) + " " + std::to_string(kDimension) + "\n";
  for (const auto& [w, v] : embeddings) {
    out += w;
    for (double x : v) out += " " + incongruity::detail::format_double(x);
    out += "\n";
  }
  return out;
}

inline std::string Benchmark::function_words_text() const {
  std::string out = "# function words for the synthetic benchmark\n";
  for (const auto& w : function_words()) out += w + "\n";
  return out;
}

inline std::string Benchmark::antonyms_text() const {
  std::string out;
  for (const auto& [a, b] : antonym_pairs()) out += a + "\t" + b + "\n";
  return out;
}

// root -> category -> cluster -> one synset per word; carrier words hang off
// a "carrier" category, one synset each.
inline std::string Benchmark::taxonomy_edges_text() const {
  std::string out;
  std::set<std::string> categories;
  for (const auto& c : clusters()) {
    if (categories.insert(c.category).second) out += "cat." + c.category + "\tentity\n";
    out += "cluster." + c.name + "\tcat." + c.category + "\n";
    for (const auto& w : c.words) out += w + ".n.01\tcluster." + c.name + "\n";
  }
  out += "cat.carrier\tentity\n";
  for (const auto& w : detail::carrier_words()) out += w + ".n.01\tcat.carrier\n";
  return out;
}

inline std::string Benchmark::taxonomy_lemmas_text() const {
  std::string out;
  for (const auto& c : clusters())
    for (const auto& w : c.words) out += w + "\t" + w + ".n.01\n";
  for (const auto& w : detail::carrier_words()) out += w + "\t" + w + ".n.01\n";
  return out;
}

}  // namespace incongruity::synthetic
