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

// Word-pair similarity: embedding cosine and Wu-Palmer over a taxonomy, both
// with an optional antonym override that pins listed pairs to 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "incongruity/common.hpp"
#include "incongruity/corpus.hpp"

namespace incongruity {

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error("cosine: zero-norm vector");
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw Error("embedding dimension must be positive");
  }

  /// Returns false if `word` is already present (the table is unchanged).
  bool insert(std::string word, std::vector<double> vec) {
    if (vec.size() != dimension_)
      throw Error("embedding for '" + word + "' has dimension " + std::to_string(vec.size()) +
                  ", expected " + std::to_string(dimension_));
    double norm = 0.0;
    for (double x : vec) {
      if (!std::isfinite(x)) throw Error("embedding for '" + word + "' is not finite");
      norm += x * x;
    }
    if (!(norm > 0.0)) throw Error("embedding for '" + word + "' is a zero vector");
    return vectors_.emplace(std::move(word), std::move(vec)).second;
  }

  const std::vector<double>* find(const std::string& word) const {
    auto it = vectors_.find(word);
    return it == vectors_.end() ? nullptr : &it->second;
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

class AntonymLexicon {
 public:
  /// Stores the unordered pair; returns false if it was already present.
  bool insert(std::string a, std::string b) {
    if (a == b) throw Error("antonym pair is reflexive: '" + a + "'");
    if (b < a) std::swap(a, b);
    return pairs_.emplace(std::move(a), std::move(b)).second;
  }

  bool contains(const std::string& a, const std::string& b) const {
    if (a == b) return false;
    return b < a ? pairs_.count({b, a}) > 0 : pairs_.count({a, b}) > 0;
  }

  std::size_t size() const { return pairs_.size(); }
  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

inline std::optional<double> embedding_similarity(const std::string& a, const std::string& b,
                                                  const EmbeddingTable& table,
                                                  const AntonymLexicon& antonyms) {
  if (antonyms.contains(a, b)) return 0.0;
  const auto* u = table.find(a);
  const auto* v = table.find(b);
  if (!u || !v) return std::nullopt;
  return cosine_similarity(*u, *v);
}

/// A rooted tree of synsets plus the word-to-synset map. Depth counts nodes
/// on the path to the root inclusive, so depth(root) == 1.
class Taxonomy {
 public:
  using Node = std::size_t;

  /// `edges` are (child, parent) pairs; `lemmas` are (word, synset) pairs.
  /// Exactly one node may lack a parent; it becomes the root.
  Taxonomy(const std::vector<std::pair<std::string, std::string>>& edges,
           const std::vector<std::pair<std::string, std::string>>& lemmas) {
    for (const auto& [child, parent] : edges) {
      if (child == parent) throw Error("taxonomy: node '" + child + "' is its own parent");
      Node c = intern(child);
      Node p = intern(parent);
      if (parent_[c] && *parent_[c] != p)
        throw Error("taxonomy: node '" + child + "' has two parents ('" + names_[*parent_[c]] +
                    "' and '" + parent + "')");
      parent_[c] = p;
    }
    for (const auto& [word, synset] : lemmas) lemma_map_[word].insert(intern(synset));

    compute_depths();
  }

  std::size_t size() const { return names_.size(); }
  Node root() const { return root_; }
  const std::string& name(Node n) const { return names_[n]; }
  std::optional<Node> parent(Node n) const { return parent_[n]; }
  std::size_t depth(Node n) const { return depth_[n]; }

  std::optional<Node> find(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Senses of `word`; empty when the word has none.
  const std::set<Node>& senses(const std::string& word) const {
    static const std::set<Node> kNone;
    auto it = lemma_map_.find(word);
    return it == lemma_map_.end() ? kNone : it->second;
  }

  /// Deepest node that is an ancestor-or-self of both.
  Node lowest_common_subsumer(Node a, Node b) const {
    while (depth_[a] > depth_[b]) a = *parent_[a];
    while (depth_[b] > depth_[a]) b = *parent_[b];
    while (a != b) {
      a = *parent_[a];
      b = *parent_[b];
    }
    return a;
  }

 private:
  Node intern(const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, names_.size());
    if (inserted) {
      names_.push_back(name);
      parent_.emplace_back();
    }
    return it->second;
  }

  void compute_depths() {
    const std::size_t n = names_.size();
    if (n == 0) throw Error("taxonomy: no synsets");
    // 0 = unvisited, 1 = on the current path, 2 = done.
    std::vector<int> state(n, 0);
    depth_.assign(n, 0);
    for (Node start = 0; start < n; ++start) {
      std::vector<Node> path;
      Node cur = start;
      while (state[cur] == 0) {
        state[cur] = 1;
        path.push_back(cur);
        if (!parent_[cur]) break;
        cur = *parent_[cur];
      }
      if (state[cur] == 1 && parent_[cur]) {
        std::string cycle = names_[cur];
        for (Node x = *parent_[cur]; x != cur; x = *parent_[x]) cycle += " -> " + names_[x];
        throw Error("taxonomy: cycle " + cycle + " -> " + names_[cur]);
      }
      for (Node x : path) state[x] = 2;
    }
    std::vector<Node> roots;
    for (Node i = 0; i < n; ++i)
      if (!parent_[i]) roots.push_back(i);
    if (roots.size() != 1) {
      std::string list;
      for (std::size_t i = 0; i < roots.size() && i < 5; ++i)
        list += (i ? ", '" : "'") + names_[roots[i]] + "'";
      throw Error("taxonomy: expected one root, found " + std::to_string(roots.size()) +
                  " parentless synsets (orphans: " + list + ")");
    }
    root_ = roots.front();
    for (Node i = 0; i < n; ++i) depth_of(i);
  }

  std::size_t depth_of(Node n) {
    if (depth_[n]) return depth_[n];
    std::vector<Node> chain;
    Node cur = n;
    while (!depth_[cur] && parent_[cur]) {
      chain.push_back(cur);
      cur = *parent_[cur];
    }
    if (!depth_[cur]) depth_[cur] = 1;  // root
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth_[*it] = depth_[*parent_[*it]] + 1;
    return depth_[n];
  }

  std::unordered_map<std::string, Node> ids_;
  std::vector<std::string> names_;
  std::vector<std::optional<Node>> parent_;
  std::vector<std::size_t> depth_;
  std::unordered_map<std::string, std::set<Node>> lemma_map_;
  Node root_ = 0;
};

/// Max over sense pairs of 2*depth(lcs) / (depth(a) + depth(b)); undefined
/// when either word has no sense.
inline std::optional<double> wu_palmer_similarity(const std::string& a, const std::string& b,
                                                  const Taxonomy& tax) {
  const auto& sa = tax.senses(a);
  const auto& sb = tax.senses(b);
  if (sa.empty() || sb.empty()) return std::nullopt;
  double best = 0.0;
  for (auto x : sa) {
    for (auto y : sb) {
      auto lcs = tax.lowest_common_subsumer(x, y);
      double s = 2.0 * static_cast<double>(tax.depth(lcs)) /
                 static_cast<double>(tax.depth(x) + tax.depth(y));
      best = std::max(best, s);
    }
  }
  return best;
}

/// Runtime-selectable similarity backend.
class WordSimilarity {
 public:
  virtual ~WordSimilarity() = default;
  virtual std::optional<double> similarity(const std::string& a, const std::string& b) const = 0;
  /// Closed range of values the backend can return.
  virtual std::pair<double, double> range() const = 0;
  virtual std::string_view id() const = 0;
};

class EmbeddingSimilarity final : public WordSimilarity {
 public:
  EmbeddingSimilarity(const EmbeddingTable& table, const AntonymLexicon& antonyms)
      : table_(&table), antonyms_(&antonyms) {}

  std::optional<double> similarity(const std::string& a, const std::string& b) const override {
    return embedding_similarity(a, b, *table_, *antonyms_);
  }
  std::pair<double, double> range() const override { return {-1.0, 1.0}; }
  std::string_view id() const override { return "embedding"; }

 private:
  const EmbeddingTable* table_;
  const AntonymLexicon* antonyms_;
};

class WuPalmerSimilarity final : public WordSimilarity {
 public:
  /// `antonyms` may be null to disable the override.
  explicit WuPalmerSimilarity(const Taxonomy& tax, const AntonymLexicon* antonyms = nullptr)
      : tax_(&tax), antonyms_(antonyms) {}

  std::optional<double> similarity(const std::string& a, const std::string& b) const override {
    if (antonyms_ && antonyms_->contains(a, b)) return 0.0;
    return wu_palmer_similarity(a, b, *tax_);
  }
  std::pair<double, double> range() const override {
    return {antonyms_ ? 0.0 : std::nextafter(0.0, 1.0), 1.0};
  }
  std::string_view id() const override { return "wordnet"; }

 private:
  const Taxonomy* tax_;
  const AntonymLexicon* antonyms_;
};

// ---------------------------------------------------------------------------
// Loaders

/// Text format: optional "<count> <dim>" header, then "<word> <f1> ... <fdim>".
inline EmbeddingTable parse_embeddings(std::string_view text) {
  auto lines = detail::split_lines(text);
  std::size_t first = 0;
  std::optional<std::size_t> declared_count;
  std::size_t dim = 0;
  if (!lines.empty()) {
    auto head = detail::split_whitespace(lines[0]);
    std::size_t c = 0, d = 0;
    if (head.size() == 2 && detail::parse_int(head[0], c) && detail::parse_int(head[1], d)) {
      if (d == 0) throw Error("embeddings line 1: dimension must be positive");
      declared_count = c;
      dim = d;
      first = 1;
    }
  }
  std::optional<EmbeddingTable> table;
  if (dim) table.emplace(dim);
  std::unordered_set<std::string> exact_seen;
  std::size_t rows = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string where = "embeddings line " + std::to_string(i + 1);
    auto fields = detail::split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw Error(where + ": expected a word followed by values");
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      double x = 0;
      if (!detail::parse_double(fields[f], x))
        throw Error(where + ": bad number '" + fields[f] + "'");
      vec.push_back(x);
    }
    if (!table) table.emplace(vec.size());
    if (vec.size() != table->dimension())
      throw Error(where + ": dimension " + std::to_string(vec.size()) + ", expected " +
                  std::to_string(table->dimension()));
    ++rows;
    std::string word;
    try {
      word = detail::lowercase(fields[0]);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    bool exact_dup = !exact_seen.insert(fields[0]).second;
    const auto* existing = table->find(word);
    if (existing) {
      // Case variants folding onto an existing entry keep the first vector.
      if (exact_dup && *existing != vec)
        throw Error(where + ": duplicate word '" + fields[0] + "' with a conflicting vector");
      continue;
    }
    try {
      table->insert(word, std::move(vec));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  if (!table) throw Error("embeddings: no vectors");
  if (declared_count && *declared_count != rows)
    throw Error("embeddings: header declares " + std::to_string(*declared_count) +
                " rows but file has " + std::to_string(rows));
  return std::move(*table);
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  try {
    return parse_embeddings(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

namespace detail {

/// Non-blank, non-comment lines split on TAB into exactly two fields.
struct TsvPair {
  std::size_t line = 0;
  std::string first, second;
};

inline std::vector<TsvPair> parse_tsv_pairs(std::string_view text, std::string_view what,
                                            bool lower) {
  std::vector<TsvPair> out;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_char(line, '\t');
    const std::string where = std::string(what) + " line " + std::to_string(i + 1);
    if (fields.size() != 2) throw Error(where + ": expected two TAB-separated fields");
    std::string a(trim(fields[0])), b(trim(fields[1]));
    if (a.empty() || b.empty()) throw Error(where + ": empty field");
    if (lower) {
      a = lowercase(a);
      b = lowercase(b);
    }
    out.push_back({i + 1, std::move(a), std::move(b)});
  }
  return out;
}

}  // namespace detail

inline AntonymLexicon parse_antonyms(std::string_view text) {
  AntonymLexicon lex;
  for (auto& p : detail::parse_tsv_pairs(text, "antonyms", true)) {
    try {
      lex.insert(std::move(p.first), std::move(p.second));
    } catch (const Error& e) {
      throw Error("antonyms line " + std::to_string(p.line) + ": " + e.what());
    }
  }
  return lex;
}

inline AntonymLexicon load_antonyms(const std::string& path) {
  try {
    return parse_antonyms(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Edges are "child<TAB>parent"; lemmas are "word<TAB>synset_id".
inline Taxonomy parse_taxonomy(std::string_view edges_text, std::string_view lemmas_text) {
  std::vector<std::pair<std::string, std::string>> edges, lemmas;
  for (auto& p : detail::parse_tsv_pairs(edges_text, "taxonomy edges", false))
    edges.emplace_back(std::move(p.first), std::move(p.second));
  for (auto& p : detail::parse_tsv_pairs(lemmas_text, "taxonomy lemmas", false))
    lemmas.emplace_back(detail::lowercase(p.first), std::move(p.second));
  return Taxonomy(edges, lemmas);
}

inline Taxonomy load_taxonomy(const std::string& edges_path, const std::string& lemmas_path) {
  return parse_taxonomy(detail::read_file(edges_path), detail::read_file(lemmas_path));
}

}  // namespace incongruity
