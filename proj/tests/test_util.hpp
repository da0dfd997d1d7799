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

// Shared fixtures for the test binaries.

#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <optional>
#include <string>
#include <utility>
#include <unordered_set>
#include <vector>

#include "incongruity/incongruity.hpp"

namespace incongruity::testing {

inline std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.surface));
  return out;
}

inline Document doc(std::string id, std::string_view text, Label label = Label::unlabeled,
                    std::optional<std::size_t> gold = std::nullopt) {
  return Document(std::move(id), tokenize(text), label, gold);
}

/// Similarity given by an explicit symmetric table; pairs not listed are
/// undefined, and identical words score 1.
class TableSimilarity final : public WordSimilarity {
 public:
  void set(const std::string& a, const std::string& b, double v) {
    values_[key(a, b)] = v;
  }
  std::optional<double> similarity(const std::string& a, const std::string& b) const override {
    if (a == b) return 1.0;
    auto it = values_.find(key(a, b));
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  std::pair<double, double> range() const override { return {-1.0, 1.0}; }
  std::string_view id() const override { return "table"; }

 private:
  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }
  std::map<std::pair<std::string, std::string>, double> values_;
};

/// Two 2-d vectors whose cosine is `target` by construction.
inline std::pair<std::vector<double>, std::vector<double>> vectors_with_cosine(double target) {
  return {{1.0, 0.0}, {target, std::sqrt(1.0 - target * target)}};
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      path_ = base / ("incongruity-test-" + std::to_string(::getpid()) + "-" + std::to_string(i));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name = "") const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// A random closed world for property tests: vocabulary with random
/// embeddings (a few words left without vectors), a function-word list, a
/// few antonym pairs and an n-gram model trained on random sentences.
struct RandomWorld {
  std::vector<std::string> vocab;
  FunctionWordLexicon function_words;
  EmbeddingTable embeddings{4};
  AntonymLexicon antonyms;
  std::unique_ptr<NGramCompleter> completer;
  std::unique_ptr<EmbeddingSimilarity> similarity;

  explicit RandomWorld(std::uint32_t seed, std::size_t vocab_size = 30) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::unordered_set<std::string> fw;
    for (std::size_t i = 0; i < vocab_size; ++i) {
      vocab.push_back("v" + std::to_string(i));
      if (i % 7 == 0) fw.insert(vocab.back());
      if (i % 11 == 5) continue;  // no vector
      std::vector<double> v(4);
      for (auto& x : v) x = u(rng);
      v[0] += 0.05;
      embeddings.insert(vocab.back(), v);
    }
    function_words = FunctionWordLexicon(fw);
    for (int k = 0; k < 4; ++k) {
      auto a = vocab[rng() % vocab.size()], b = vocab[rng() % vocab.size()];
      if (a != b) antonyms.insert(a, b);
    }
    std::vector<std::vector<std::string>> corpus;
    for (int s = 0; s < 60; ++s) corpus.push_back(sentence(rng));
    completer = std::make_unique<NGramCompleter>(train_ngram(corpus, 2 + seed % 2));
    similarity = std::make_unique<EmbeddingSimilarity>(embeddings, antonyms);
  }

  std::vector<std::string> sentence(std::mt19937& rng) const {
    std::size_t len = 1 + rng() % 10;
    std::vector<std::string> s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(vocab[rng() % vocab.size()]);
    return s;
  }

  Document document(std::mt19937& rng, const std::string& id) const {
    std::vector<Token> toks;
    for (auto& w : sentence(rng)) toks.push_back(Token{w, toks.size()});
    std::optional<std::size_t> gold = rng() % toks.size();
    Label label = rng() % 2 ? Label::sarcastic : Label::non_sarcastic;
    return Document(id, std::move(toks), label, gold);
  }

  Resources resources() const { return Resources{function_words, *completer, *similarity}; }
};

}  // namespace incongruity::testing
