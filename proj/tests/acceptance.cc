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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "incongruity/incongruity.hpp"
#include "incongruity/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace incongruity;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// 1. Restricting positions can only raise the minimum.
Outcome subset_min_dominance() {
  Outcome out;
  std::size_t docs = 0;
  const double thresholds[] = {-0.5, 0.0, 0.1, 0.3, 0.6, 0.9};
  for (std::uint32_t seed = 0; seed < 8; ++seed) {
    testing::RandomWorld world(seed);
    auto res = world.resources();
    std::mt19937 rng(1000 + seed);
    for (int i = 0; i < 50; ++i, ++docs) {
      auto d = world.document(rng, "d" + std::to_string(docs));
      auto all = score_all_words(d, DetectionConfig{0.0}, res);
      auto inc = score_incongruous_only(d, DetectionConfig{0.0}, res);
      out.check(inc.score >= all.score, "score order violated on " + d.id());
      for (double t : thresholds)
        out.check(classify(inc.score, t) != Label::sarcastic || classify(all.score, t) == Label::sarcastic,
                  "sarcastic subset violated on " + d.id());
    }
  }
  if (out.ok) out.detail = std::to_string(docs) + " documents";
  return out;
}

// 2. Midpoint sweep against a dense uniform grid.
Outcome sweep_optimality() {
  Outcome out;
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng() % 50;
    std::vector<std::pair<double, bool>> items;
    std::vector<ScoredDocument> docs;
    // Scores on a 0.01 lattice so the grid resolves every gap.
    for (std::size_t i = 0; i < n; ++i) {
      double s = static_cast<double>(static_cast<int>(rng() % 201) - 100) / 100.0;
      bool pos = rng() % 2;
      items.emplace_back(s, pos);
      docs.push_back({std::to_string(i), s, pos ? Label::sarcastic : Label::non_sarcastic});
    }
    double lo = items[0].first, hi = items[0].first;
    for (auto& [s, _] : items) lo = std::min(lo, s), hi = std::max(hi, s);
    double grid = oracle::grid_best_f1(items, lo - 0.01, hi + 0.01, 10000);
    out.check(threshold_sweep(docs).best_metrics.f1 == grid, "trial " + std::to_string(trial));
  }
  if (out.ok) out.detail = "100 score sets";
  return out;
}

// 3. n-gram completion against direct window matching.
Outcome completion_oracle() {
  Outcome out;
  std::mt19937 rng(77);
  std::size_t queries = 0;
  for (int c = 0; c < 20; ++c) {
    const std::size_t order = 2 + c % 3;
    const std::size_t vocab = 3 + rng() % 8;
    const std::size_t budget = 50 + rng() % 951;
    auto sentence = [&] {
      std::vector<std::string> s(1 + rng() % 9);
      for (auto& w : s) w = "w" + std::to_string(rng() % vocab);
      return s;
    };
    std::vector<std::vector<std::string>> corpus;
    for (std::size_t tokens = 0;;) {
      auto s = sentence();
      if (tokens + s.size() > budget) break;
      tokens += s.size();
      corpus.push_back(std::move(s));
    }
    if (corpus.empty()) corpus.push_back({"w0"});
    auto model = train_ngram(corpus, order);
    std::vector<std::vector<std::string>> probes;
    for (int i = 0; i < 15; ++i) probes.push_back(corpus[rng() % corpus.size()]);
    for (int i = 0; i < 15; ++i) {
      auto s = sentence();
      if (i % 3 == 0) s.front() = "unseen";
      probes.push_back(std::move(s));
    }
    for (const auto& q : probes)
      for (std::size_t b = 0; b < q.size(); ++b, ++queries) {
        auto got = complete_ngram(model, CompletionQuery{q, b});
        auto want = oracle::complete(corpus, order, q, b);
        out.check(got == want, "corpus " + std::to_string(c) + " query '" +
                                   detail::join(q, " ") + "' blank " + std::to_string(b));
      }
  }
  if (out.ok) out.detail = std::to_string(queries) + " queries over 20 corpora";
  return out;
}

// 4. Wu-Palmer on a fixed 12-node taxonomy.
Outcome wu_palmer() {
  Outcome out;
  const std::map<std::string, std::string> parent = {
      {"living", "entity"}, {"artifact", "entity"}, {"animal", "living"}, {"plant", "living"},
      {"dog", "animal"},    {"cat", "animal"},      {"tree", "plant"},    {"vehicle", "artifact"},
      {"hammer", "artifact"}, {"car", "vehicle"},  {"bicycle", "vehicle"}};
  std::vector<std::pair<std::string, std::string>> edges(parent.begin(), parent.end());
  std::map<std::string, std::set<std::string>> senses;
  for (const auto& [child, _] : parent) senses[child].insert(child);
  senses["thing"].insert("entity");
  senses["jaguar"] = {"cat", "car"};
  std::vector<std::pair<std::string, std::string>> lemmas;
  for (const auto& [w, ss] : senses)
    for (const auto& s : ss) lemmas.emplace_back(w, s);
  Taxonomy tax(edges, lemmas);
  out.check(tax.size() == 12, "taxonomy has " + std::to_string(tax.size()) + " nodes");
  oracle::TreeOracle tree(parent);
  std::size_t pairs = 0;
  for (const auto& [a, sa] : senses)
    for (const auto& [b, sb] : senses) {
      auto got = wu_palmer_similarity(a, b, tax);
      auto want = tree.word_wup(sa, sb);
      out.check(got && std::abs(*got - *want) <= 1e-9, "wup(" + a + ", " + b + ")");
      if (a == b) out.check(got && *got == 1.0, "wup(" + a + ", " + a + ") != 1");
      ++pairs;
    }
  const std::vector<std::tuple<std::string, std::string, double>> hand = {
      {"dog", "cat", 0.75}, {"dog", "tree", 0.5}, {"dog", "car", 0.25},
      {"hammer", "car", 4.0 / 7}, {"thing", "dog", 0.4}, {"jaguar", "bicycle", 0.75}};
  for (const auto& [a, b, v] : hand) {
    auto got = wu_palmer_similarity(a, b, tax);
    out.check(got && std::abs(*got - v) <= 1e-9, "hand value wup(" + a + ", " + b + ")");
  }
  out.check(!wu_palmer_similarity("cottoned", "dog", tax), "unknown lemma is not ignored");
  out.check(!wu_palmer_similarity("dog", "cottoned", tax), "unknown lemma is not ignored");
  if (out.ok) out.detail = std::to_string(pairs) + " word pairs";
  return out;
}

// 5. Cosine against the direct formula; antonyms pinned at zero.
Outcome cosine_and_antonyms() {
  Outcome out;
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::size_t dim = 1 + rng() % 300;
    std::vector<double> u(dim), v(dim);
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    worst = std::max(worst, std::abs(cosine_similarity(u, v) - oracle::cosine(u, v)));
  }
  out.check(worst <= 1e-12, "max cosine error " + detail::format_double(worst));
  auto bench = synthetic::generate(9, 20);
  EmbeddingTable table(synthetic::kDimension);
  for (const auto& [w, v] : bench.embeddings) table.insert(w, v);
  AntonymLexicon antonyms;
  for (const auto& [a, b] : synthetic::antonym_pairs()) antonyms.insert(a, b);
  EmbeddingSimilarity emb(table, antonyms);
  auto tax = parse_taxonomy(bench.taxonomy_edges_text(), bench.taxonomy_lemmas_text());
  WuPalmerSimilarity wup(tax, &antonyms);
  for (const auto& [a, b] : synthetic::antonym_pairs())
    for (const WordSimilarity* s : {static_cast<const WordSimilarity*>(&emb),
                                    static_cast<const WordSimilarity*>(&wup)}) {
      out.check(s->similarity(a, b) == 0.0, std::string(s->id()) + " " + a + "/" + b);
      out.check(s->similarity(b, a) == 0.0, std::string(s->id()) + " " + b + "/" + a);
    }
  if (out.ok) out.detail = "max cosine error " + detail::format_double(worst);
  return out;
}

struct BenchRun {
  synthetic::Benchmark bench;
  Dataset ds;
  FunctionWordLexicon function_words;
  EmbeddingTable table{synthetic::kDimension};
  AntonymLexicon antonyms;
  NGramModel model;
  explicit BenchRun(std::uint64_t seed, std::size_t count)
      : bench(synthetic::generate(seed, count)),
        ds(parse_dataset(bench.dataset_jsonl())),
        function_words(parse_function_words(bench.function_words_text())),
        antonyms(parse_antonyms(bench.antonyms_text())),
        model(train_ngram(bench.corpus, 3)) {
    for (const auto& [w, v] : bench.embeddings) table.insert(w, v);
  }
};

// 6. Directional reproduction on the planted-incongruity benchmark.
Outcome planted_benchmark() {
  Outcome out;
  std::ostringstream detail;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    BenchRun run(seed, 500);
    out.check(run.ds.documents.size() == 500, "benchmark size");
    NGramCompleter lm(run.model);
    RecordingCompleter recorder(lm);
    EmbeddingSimilarity sim(run.table, run.antonyms);
    Resources res{run.function_words, recorder, sim};

    auto cmp = oracle_comparison(run.ds, DetectionConfig{0.0}, res);
    const double f_all = cmp.all_words.best_metrics.f1, f_oracle = cmp.exact_word.best_metrics.f1;
    out.check(f_all >= 0.90, "seed " + std::to_string(seed) + ": all-words F " +
                                 detail::format_double(f_all) + " < 0.90");
    out.check(f_oracle >= f_all, "seed " + std::to_string(seed) + ": oracle F below all-words F");

    for (const auto& d : run.ds.documents) {
      auto pos = content_positions(d, run.function_words);
      auto avg = incongruity_averages(d, pos, sim);
      std::vector<double> sorted = avg;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t k = (pos.size() + 1) / 2;
      std::size_t bound = pos.size();
      if (k > 0) {
        const double cut = sorted[k - 1];
        bound = k + static_cast<std::size_t>(std::count(sorted.begin() + k, sorted.end(), cut));
      }
      recorder.clear();
      score_incongruous_only(d, DetectionConfig{0.0, Approach::incongruous_only}, res);
      out.check(recorder.calls().size() <= bound, "document " + d.id() + " consulted " +
                                                   std::to_string(recorder.calls().size()) +
                                                   " positions, bound " + std::to_string(bound));
    }
    detail << (seed > 1 ? ", " : "") << "seed " << seed << " F " << fixed4(f_all) << " / oracle "
           << fixed4(f_oracle);
  }
  if (out.ok) out.detail = detail.str();
  return out;
}

// 7. Two-fold protocol on a 40-document labeled set.
Outcome two_fold_protocol() {
  Outcome out;
  BenchRun run(40, 40);
  NGramCompleter lm(run.model);
  EmbeddingSimilarity sim(run.table, run.antonyms);
  Resources res{run.function_words, lm, sim};
  DetectionConfig cfg{0.0};
  auto rep = two_fold_cv(run.ds, cfg, res, 7);
  std::multiset<std::string> tested;
  for (const auto& f : rep.folds) tested.insert(f.test_ids.begin(), f.test_ids.end());
  std::multiset<std::string> all;
  for (const auto& d : run.ds.documents) all.insert(d.id());
  out.check(tested == all, "test folds do not partition the documents");
  out.check(rep.folds[0].test_split != rep.folds[1].test_split, "both folds test the same split");
  auto json = to_json(rep);
  out.check(json["folds"].size() == 2 && json["folds"][0].contains("threshold") &&
                json["folds"][1].contains("threshold"),
            "per-fold thresholds missing");
  out.check(rep.pooled.total() == 40, "pooled metrics do not cover every document");
  const std::string a = dump_json(json);
  const std::string b = dump_json(to_json(two_fold_cv(run.ds, cfg, res, 7, 4)));
  out.check(a == b, "reports differ under the same seed");
  if (out.ok)
    out.detail = "fold thresholds " + fixed4(rep.folds[0].threshold) + " / " +
                 fixed4(rep.folds[1].threshold);
  return out;
}

// 8. "i love being ignored" end to end.
Outcome worked_example() {
  Outcome out;
  FunctionWordLexicon lexicon({"i", "being"});
  EmbeddingTable table(2);
  auto [happy, ignored] = testing::vectors_with_cosine(0.0204);
  table.insert("happy", happy);
  table.insert("ignored", ignored);
  AntonymLexicon antonyms;
  auto completions = parse_completion_table(R"({"i love being []": "happy"})");
  TableCompleter completer(completions);
  EmbeddingSimilarity sim(table, antonyms);
  Resources res{lexicon, completer, sim};
  auto d = testing::doc("ex", "i love being ignored");
  auto hi = score(d, DetectionConfig{0.11}, res);
  auto lo = score(d, DetectionConfig{0.01}, res);
  out.check(hi.predicted == Label::sarcastic, "not sarcastic at T = 0.11");
  out.check(lo.predicted == Label::non_sarcastic, "sarcastic at T = 0.01");
  out.check(hi.argmin && hi.argmin->position == 3 && hi.argmin->observed == "ignored",
            "argmin is not the 'ignored' position");
  out.check(std::abs(hi.score - 0.0204) < 1e-12, "score " + detail::format_double(hi.score));
  if (out.ok) out.detail = "score " + detail::format_double(hi.score);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"subset-min dominance", 5, subset_min_dominance},
      {"sweep optimality", 10, sweep_optimality},
      {"completion oracle equivalence", 10, completion_oracle},
      {"wu-palmer correctness", 0, wu_palmer},
      {"cosine and antonym override", 0, cosine_and_antonyms},
      {"planted-incongruity benchmark", 30, planted_benchmark},
      {"two-fold protocol", 0, two_fold_protocol},
      {"worked example", 0, worked_example},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o.ok = false;
      o.detail = "over the " + detail::format_double(c.budget_seconds) + " s budget";
    }
    failures += !o.ok;
    std::printf("%s  %zu  %-30s  %7.3f s  %s\n", o.ok ? "PASS" : "FAIL", i + 1, c.name, secs,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures ? 1 : 0;
}
