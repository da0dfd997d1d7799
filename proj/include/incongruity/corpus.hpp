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

// Tokenization, function-word filtering and dataset I/O.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "incongruity/common.hpp"

namespace incongruity {

enum class Label { sarcastic, non_sarcastic, unlabeled };

inline std::string_view to_string(Label label) {
  switch (label) {
    case Label::sarcastic:
      return "sarcastic";
    case Label::non_sarcastic:
      return "non_sarcastic";
    case Label::unlabeled:
      break;
  }
  return "unlabeled";
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "sarcastic") return Label::sarcastic;
  if (s == "non_sarcastic") return Label::non_sarcastic;
  if (s == "unlabeled") return Label::unlabeled;
  return std::nullopt;
}

struct Token {
  std::string surface;
  std::size_t index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

/// Decodes one code point starting at `pos`, advancing it. Throws on
/// malformed sequences.
inline char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char lead = byte(pos);
  int extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    throw Error("invalid UTF-8 at byte " + std::to_string(pos));
  }
  if (pos + extra >= s.size())
    throw Error("truncated UTF-8 at byte " + std::to_string(pos));
  for (int k = 1; k <= extra; ++k) {
    unsigned char c = byte(pos + k);
    if ((c & 0xC0) != 0x80)
      throw Error("invalid UTF-8 at byte " + std::to_string(pos + k));
    cp = (cp << 6) | (c & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    throw Error("invalid UTF-8 code point at byte " + std::to_string(pos));
  pos += extra + 1;
  return cp;
}

// Word characters: ASCII letters and digits, apostrophes (U+2019 folds to
// '\''), and any non-ASCII code point outside the Latin-1 symbol range and
// the General Punctuation / symbol blocks.
inline bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9') || cp == '\'';
  }
  if (cp == 0x2019) return true;
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, arrows, ...
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp >= 0x1F000) return false;  // emoji and pictographs
  return true;
}

inline char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp == 0x2019) return '\'';
  return cp;
}

}  // namespace detail

/// Maximal runs of word characters, lowercased, indexed from 0.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(Token{std::move(current), tokens.size()});
      current.clear();
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = detail::decode_utf8(text, pos);
    if (detail::is_word_char(cp)) {
      detail::append_utf8(current, detail::fold_case(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

/// A tokenized text with its gold label and, for the oracle setting, the
/// index of the annotated incongruous word.
class Document {
 public:
  Document(std::string id, std::vector<Token> tokens, Label label = Label::unlabeled,
           std::optional<std::size_t> gold_incongruous = std::nullopt)
      : id_(std::move(id)),
        tokens_(std::move(tokens)),
        label_(label),
        gold_incongruous_(gold_incongruous) {
    if (tokens_.empty()) throw Error("document '" + id_ + "' has no tokens");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].surface.empty() ||
          tokens_[i].surface.find_first_of(" \t\r\n") != std::string::npos)
        throw Error("document '" + id_ + "' has an invalid token at " +
                    std::to_string(i));
      tokens_[i].index = i;
      surfaces_.push_back(tokens_[i].surface);
    }
    if (gold_incongruous_ && *gold_incongruous_ >= tokens_.size())
      throw Error("document '" + id_ + "' gold index out of range");
  }

  /// Tokenizes `text`; throws if it yields no tokens.
  static Document from_text(std::string id, std::string_view text,
                            Label label = Label::unlabeled) {
    return Document(std::move(id), tokenize(text), label);
  }

  const std::string& id() const { return id_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<std::string>& surfaces() const { return surfaces_; }
  std::size_t size() const { return tokens_.size(); }
  Label label() const { return label_; }
  const std::optional<std::size_t>& gold_incongruous() const {
    return gold_incongruous_;
  }

 private:
  std::string id_;
  std::vector<Token> tokens_;
  std::vector<std::string> surfaces_;
  Label label_;
  std::optional<std::size_t> gold_incongruous_;
};

class FunctionWordLexicon {
 public:
  FunctionWordLexicon() = default;
  explicit FunctionWordLexicon(std::unordered_set<std::string> words)
      : words_(std::move(words)) {}

  /// Expects a lowercased surface.
  bool contains(std::string_view word) const {
    return words_.find(std::string(word)) != words_.end();
  }
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

struct Dataset {
  std::vector<Document> documents;
};

/// Indices of tokens not in the lexicon, in order, one per occurrence.
inline std::vector<std::size_t> content_positions(const Document& doc,
                                                  const FunctionWordLexicon& lexicon) {
  std::vector<std::size_t> positions;
  for (const Token& t : doc.tokens())
    if (!lexicon.contains(t.surface)) positions.push_back(t.index);
  return positions;
}

namespace detail {

inline std::string lowercase(std::string_view s) {
  std::string out;
  std::size_t pos = 0;
  while (pos < s.size()) append_utf8(out, fold_case(decode_utf8(s, pos)));
  return out;
}

inline Document parse_document_line(const std::string& line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(where + ": malformed JSON: " + e.what());
  }
  if (!j.is_object()) throw Error(where + ": expected a JSON object");
  if (!j.contains("id") || !j["id"].is_string())
    throw Error(where + ": missing string field 'id'");
  if (!j.contains("text") || !j["text"].is_string())
    throw Error(where + ": missing string field 'text'");
  std::string id = j["id"].get<std::string>();

  Label label = Label::unlabeled;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw Error(where + ": 'label' must be a string");
    auto parsed = parse_label(j["label"].get<std::string>());
    if (!parsed) throw Error(where + ": unknown label '" + j["label"].get<std::string>() + "'");
    label = *parsed;
  }

  std::vector<Token> tokens;
  try {
    tokens = tokenize(j["text"].get<std::string>());
  } catch (const Error& e) {
    throw Error(where + ": " + e.what());
  }
  if (tokens.empty()) throw Error(where + ": document '" + id + "' has no word tokens");

  std::optional<std::size_t> gold;
  if (j.contains("incongruous_word") && !j["incongruous_word"].is_null()) {
    if (!j["incongruous_word"].is_string())
      throw Error(where + ": 'incongruous_word' must be a string");
    auto word = tokenize(j["incongruous_word"].get<std::string>());
    if (word.size() != 1)
      throw Error("document '" + id + "': incongruous word must be a single token");
    for (const Token& t : tokens) {
      if (t.surface == word.front().surface) {
        gold = t.index;
        break;
      }
    }
    if (!gold)
      throw Error("document '" + id + "': incongruous word '" + word.front().surface +
                  "' not found in text");
  }
  return Document(std::move(id), std::move(tokens), label, gold);
}

}  // namespace detail

/// Parses JSON Lines text; blank lines are skipped.
inline Dataset parse_dataset(std::string_view text) {
  Dataset ds;
  std::unordered_set<std::string> seen;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    Document doc = detail::parse_document_line(lines[i], i + 1);
    if (!seen.insert(doc.id()).second)
      throw Error("line " + std::to_string(i + 1) + ": duplicate document id '" +
                  doc.id() + "'");
    ds.documents.push_back(std::move(doc));
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path) {
  try {
    return parse_dataset(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

inline FunctionWordLexicon parse_function_words(std::string_view text) {
  std::unordered_set<std::string> words;
  for (const std::string& raw : detail::split_lines(text)) {
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    words.insert(detail::lowercase(line));
  }
  if (words.empty()) throw Error("function-word lexicon is empty");
  return FunctionWordLexicon(std::move(words));
}

inline FunctionWordLexicon load_function_words(const std::string& path) {
  try {
    return parse_function_words(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace incongruity
