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

// Sentence completion: "which word is most likely at this blanked position".
//
// Two backends implement the Completer contract. NGramModel counts the words
// seen under left, right and joint (left+right) context windows and answers
// with the top-1 word under the longest matching window. CompletionTable is an
// exact lookup keyed by the blanked string, e.g. "i love being []".

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "incongruity/common.hpp"
#include "incongruity/corpus.hpp"

namespace incongruity {

/// A document's token surfaces with one position blanked out. Completers
/// must not look at `tokens[blank]`.
struct CompletionQuery {
  std::span<const std::string> tokens;
  std::size_t blank = 0;

  void validate() const {
    if (blank >= tokens.size())
      throw Error("completion query blank " + std::to_string(blank) +
                  " out of range for length " + std::to_string(tokens.size()));
  }
};

class Completer {
 public:
  virtual ~Completer() = default;
  virtual std::optional<std::string> complete(const CompletionQuery& query) const = 0;
};

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kBlankMarker = "[]";

enum class ContextKind : char { joint = 'J', left = 'L', right = 'R' };

/// Context windows of a position in a sentence padded with one start and
/// one end marker. A window of size k exists only when k symbols (markers
/// included) are available on that side.
class ContextWindows {
 public:
  ContextWindows(std::span<const std::string> tokens, std::size_t position)
      : tokens_(tokens), position_(position) {}

  bool has_left(std::size_t k) const { return k >= 1 && k <= position_ + 1; }
  bool has_right(std::size_t k) const {
    return k >= 1 && k <= tokens_.size() - position_;
  }

  std::string left(std::size_t k) const {
    std::string out;
    for (std::size_t j = k; j >= 1; --j) {
      if (!out.empty()) out += ' ';
      out += j > position_ ? std::string(kSentenceStart) : tokens_[position_ - j];
    }
    return out;
  }

  std::string right(std::size_t k) const {
    std::string out;
    for (std::size_t j = 1; j <= k; ++j) {
      if (!out.empty()) out += ' ';
      std::size_t idx = position_ + j;
      out += idx >= tokens_.size() ? std::string(kSentenceEnd) : tokens_[idx];
    }
    return out;
  }

  /// Key for `kind` at size k, or nullopt when the window does not exist.
  std::optional<std::string> key(ContextKind kind, std::size_t k) const {
    switch (kind) {
      case ContextKind::left:
        if (!has_left(k)) return std::nullopt;
        return "L:" + left(k);
      case ContextKind::right:
        if (!has_right(k)) return std::nullopt;
        return "R:" + right(k);
      case ContextKind::joint:
        if (!has_left(k) || !has_right(k)) return std::nullopt;
        return "J:" + left(k) + "|" + right(k);
    }
    return std::nullopt;
  }

 private:
  std::span<const std::string> tokens_;
  std::size_t position_;
};

/// Order in which completion looks up context keys: for each window size
/// from order-1 down to 1, joint then left then right.
inline std::vector<std::pair<ContextKind, std::size_t>> backoff_ladder(std::size_t order) {
  std::vector<std::pair<ContextKind, std::size_t>> ladder;
  for (std::size_t k = order - 1; k >= 1; --k) {
    ladder.emplace_back(ContextKind::joint, k);
    ladder.emplace_back(ContextKind::left, k);
    ladder.emplace_back(ContextKind::right, k);
  }
  return ladder;
}

class NGramModel {
 public:
  using WordCounts = std::map<std::string, std::uint64_t>;

  explicit NGramModel(std::size_t order) : order_(order) {
    if (order_ < 2) throw Error("n-gram order must be at least 2");
  }

  std::size_t order() const { return order_; }
  const std::set<std::string>& vocabulary() const { return vocabulary_; }
  const std::unordered_map<std::string, WordCounts>& counts() const { return counts_; }

  /// Count of `word` under a raw context key such as "L:the cat"; 0 if unseen.
  std::uint64_t count(const std::string& key, const std::string& word) const {
    auto it = counts_.find(key);
    if (it == counts_.end()) return 0;
    auto w = it->second.find(word);
    return w == it->second.end() ? 0 : w->second;
  }

  void add(const std::string& key, const std::string& word, std::uint64_t n = 1) {
    if (n == 0) return;
    counts_[key][word] += n;
    vocabulary_.insert(word);
  }

  /// Highest-count word under the first ladder key seen in training; ties go
  /// to the lexicographically smaller word.
  std::optional<std::string> complete(const CompletionQuery& query) const {
    query.validate();
    ContextWindows windows(query.tokens, query.blank);
    for (auto [kind, k] : backoff_ladder(order_)) {
      auto key = windows.key(kind, k);
      if (!key) continue;
      auto it = counts_.find(*key);
      if (it == counts_.end()) continue;
      const std::string* best = nullptr;
      std::uint64_t best_count = 0;
      for (const auto& [word, c] : it->second) {
        if (c > best_count) {
          best = &word;
          best_count = c;
        }
      }
      if (best) return *best;
    }
    return std::nullopt;
  }

  friend bool operator==(const NGramModel& a, const NGramModel& b) {
    return a.order_ == b.order_ && a.counts_ == b.counts_ &&
           a.vocabulary_ == b.vocabulary_;
  }

 private:
  std::size_t order_;
  std::unordered_map<std::string, WordCounts> counts_;
  std::set<std::string> vocabulary_;
};

namespace detail {

inline void check_lm_token(std::string_view t) {
  if (t.empty()) throw Error("empty token in n-gram corpus");
  if (t == kSentenceStart || t == kSentenceEnd || t == kBlankMarker)
    throw Error("reserved marker '" + std::string(t) + "' in n-gram corpus");
  if (t.find_first_of(" \t\r\n|") != std::string_view::npos)
    throw Error("token '" + std::string(t) + "' contains a separator character");
}

}  // namespace detail

inline NGramModel train_ngram(const std::vector<std::vector<std::string>>& corpus,
                              std::size_t order) {
  NGramModel model(order);
  std::size_t positions = 0;
  for (const auto& sentence : corpus) {
    for (const auto& t : sentence) detail::check_lm_token(t);
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      ContextWindows windows(sentence, i);
      for (std::size_t k = 1; k < order; ++k) {
        for (ContextKind kind : {ContextKind::joint, ContextKind::left, ContextKind::right}) {
          if (auto key = windows.key(kind, k)) model.add(*key, sentence[i]);
        }
      }
      ++positions;
    }
  }
  if (positions == 0) throw Error("cannot train an n-gram model on an empty corpus");
  return model;
}

inline std::optional<std::string> complete_ngram(const NGramModel& model,
                                                 const CompletionQuery& query) {
  return model.complete(query);
}

inline constexpr std::string_view kNGramMagic = "#incongruity-ngram";

/// Line-based dump: a header line, then "key<TAB>word<TAB>count" lines
/// sorted by key and word.
inline std::string serialize_ngram(const NGramModel& model) {
  std::vector<const std::string*> keys;
  keys.reserve(model.counts().size());
  for (const auto& [key, words] : model.counts()) keys.push_back(&key);
  std::sort(keys.begin(), keys.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  std::string out;
  out += std::string(kNGramMagic) + "\tv1\torder\t" + std::to_string(model.order()) + "\n";
  for (const std::string* key : keys) {
    for (const auto& [word, c] : model.counts().at(*key)) {
      out += *key;
      out += '\t';
      out += word;
      out += '\t';
      out += std::to_string(c);
      out += '\n';
    }
  }
  return out;
}

inline NGramModel parse_ngram(std::string_view text) {
  auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error("n-gram model: empty file");
  auto header = detail::split_char(lines[0], '\t');
  std::size_t order = 0;
  if (header.size() != 4 || header[0] != kNGramMagic || header[2] != "order" ||
      !detail::parse_int(header[3], order))
    throw Error("n-gram model: bad header line");
  if (header[1] != "v1") throw Error("n-gram model: unsupported version '" + header[1] + "'");
  NGramModel model(order);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "n-gram model line " + std::to_string(i + 1);
    auto fields = detail::split_char(lines[i], '\t');
    std::uint64_t c = 0;
    if (fields.size() != 3 || fields[0].size() < 3 || fields[0][1] != ':' ||
        std::string_view("JLR").find(fields[0][0]) == std::string_view::npos)
      throw Error(where + ": expected 'key<TAB>word<TAB>count'");
    if (!detail::parse_int(fields[2], c) || c == 0)
      throw Error(where + ": count must be a positive integer");
    if (model.count(fields[0], fields[1]) != 0)
      throw Error(where + ": duplicate entry");
    detail::check_lm_token(fields[1]);
    model.add(fields[0], fields[1], c);
  }
  return model;
}

inline void save_ngram(const NGramModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << serialize_ngram(model);
  if (!out) throw Error("failed writing " + path);
}

inline NGramModel load_ngram(const std::string& path) {
  try {
    return parse_ngram(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Tokens space-joined with the blank rendered as "[]".
inline std::string blanked_key(std::span<const std::string> tokens, std::size_t blank) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += i == blank ? std::string(kBlankMarker) : tokens[i];
  }
  return out;
}

class CompletionTable {
 public:
  /// Normalizes the key through the tokenizer, so "A [] needs a man." and
  /// "a [] needs a man" are the same entry. The key must hold exactly one
  /// blank and the word must be a single token.
  void put(std::string_view key, std::string_view word) {
    std::size_t at = key.find(kBlankMarker);
    if (at == std::string_view::npos || key.find(kBlankMarker, at + 2) != std::string_view::npos)
      throw Error("completion table key must contain exactly one '[]': " + std::string(key));
    std::vector<std::string> surfaces;
    for (auto& t : tokenize(key.substr(0, at))) surfaces.push_back(std::move(t.surface));
    std::size_t blank = surfaces.size();
    surfaces.emplace_back(kBlankMarker);
    for (auto& t : tokenize(key.substr(at + 2))) surfaces.push_back(std::move(t.surface));
    auto expected = tokenize(word);
    if (expected.size() != 1)
      throw Error("completion table value must be a single word: '" + std::string(word) + "'");
    std::string normalized = blanked_key(surfaces, blank);
    auto [it, inserted] = entries_.emplace(normalized, expected.front().surface);
    if (!inserted && it->second != expected.front().surface)
      throw Error("conflicting completion table entries for '" + normalized + "'");
  }

  std::optional<std::string> lookup(const CompletionQuery& query) const {
    query.validate();
    auto it = entries_.find(blanked_key(query.tokens, query.blank));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

inline std::optional<std::string> complete_table(const CompletionTable& table,
                                                 const CompletionQuery& query) {
  return table.lookup(query);
}

inline CompletionTable parse_completion_table(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("completion table: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("completion table: expected a JSON object");
  CompletionTable table;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string())
      throw Error("completion table: value for '" + key + "' must be a string");
    table.put(key, value.get<std::string>());
  }
  return table;
}

inline CompletionTable load_completion_table(const std::string& path) {
  try {
    return parse_completion_table(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

class NGramCompleter final : public Completer {
 public:
  explicit NGramCompleter(NGramModel model) : model_(std::move(model)) {}
  std::optional<std::string> complete(const CompletionQuery& query) const override {
    return complete_ngram(model_, query);
  }
  const NGramModel& model() const { return model_; }

 private:
  NGramModel model_;
};

class TableCompleter final : public Completer {
 public:
  explicit TableCompleter(CompletionTable table) : table_(std::move(table)) {}
  std::optional<std::string> complete(const CompletionQuery& query) const override {
    return complete_table(table_, query);
  }
  const CompletionTable& table() const { return table_; }

 private:
  CompletionTable table_;
};

/// Forwards to another completer and records every blanked string it was
/// asked about, in call order.
class RecordingCompleter final : public Completer {
 public:
  explicit RecordingCompleter(const Completer& inner) : inner_(&inner) {}

  std::optional<std::string> complete(const CompletionQuery& query) const override {
    query.validate();
    {
      std::lock_guard lock(mu_);
      calls_.push_back(blanked_key(query.tokens, query.blank));
    }
    return inner_->complete(query);
  }

  std::vector<std::string> calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }
  void clear() {
    std::lock_guard lock(mu_);
    calls_.clear();
  }

 private:
  const Completer* inner_;
  mutable std::mutex mu_;
  mutable std::vector<std::string> calls_;
};

}  // namespace incongruity
