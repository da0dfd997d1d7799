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

// incongruity: command-line front end.
//
//   train-lm       build an n-gram completion model from a corpus
//   detect         score a dataset at a fixed threshold
//   sweep          threshold sweep over a dataset
//   crossval       two-fold cross-validation of the threshold
//   oracle-eval    all-words vs exact-word sweeps
//   gen-synthetic  write the planted-incongruity benchmark
//
// Settings resolve as: built-in defaults < --config file (key = value) or
// --manifest < INCONGRUITY_* environment variables < command-line flags.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "incongruity/incongruity.hpp"

namespace fs = std::filesystem;
using namespace incongruity;

namespace {

constexpr const char* kToolVersion = "incongruity 1.0.0";
constexpr const char* kEnvPrefix = "INCONGRUITY_";

// Every setting the tool knows about, with its default ("" = unset).
const std::vector<std::pair<std::string, std::string>> kSettings = {
    {"data", ""},
    {"corpus", ""},
    {"function-words", ""},
    {"embeddings", ""},
    {"antonyms", ""},
    {"antonym-override", "on"},
    {"taxonomy-edges", ""},
    {"taxonomy-lemmas", ""},
    {"lm", ""},
    {"completion-table", ""},
    {"order", "3"},
    {"approach", "all-words"},
    {"similarity", "embedding"},
    {"selection-similarity", "embedding"},
    {"threshold", ""},
    {"seed", "1"},
    {"count", "500"},
    {"sarcastic-fraction", "0.3"},
    {"jobs", "1"},
    {"out", ""},
};

// Settings naming input files; their checksums go into the manifest.
const std::set<std::string> kPathSettings = {
    "data", "corpus", "function-words", "embeddings", "antonyms",
    "taxonomy-edges", "taxonomy-lemmas", "lm", "completion-table"};

// Settings that never change output bytes and stay out of the manifest.
const std::set<std::string> kVolatileSettings = {"jobs", "out"};

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char c : key) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  auto lines = incongruity::detail::split_lines(incongruity::detail::read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = incongruity::detail::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(path + " line " + std::to_string(i + 1) + ": expected 'key = value'");
    std::string key(incongruity::detail::trim(line.substr(0, eq)));
    std::string value(incongruity::detail::trim(line.substr(eq + 1)));
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = value;
  }
  return out;
}

class Settings {
 public:
  std::map<std::string, std::string> values;

  const std::string& get(const std::string& key) const { return values.at(key); }
  bool has(const std::string& key) const { return !values.at(key).empty(); }

  const std::string& require(const std::string& key, const std::string& command) const {
    if (!has(key)) throw Error(command + " requires --" + key);
    return get(key);
  }

  double number(const std::string& key) const {
    double v = 0;
    if (!incongruity::detail::parse_double(get(key), v))
      throw Error("--" + key + ": not a number: '" + get(key) + "'");
    return v;
  }

  std::uint64_t integer(const std::string& key) const {
    std::uint64_t v = 0;
    if (!incongruity::detail::parse_int(get(key), v))
      throw Error("--" + key + ": not a non-negative integer: '" + get(key) + "'");
    return v;
  }

  bool flag(const std::string& key) const {
    const auto& v = get(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw Error("--" + key + ": expected on/off, got '" + v + "'");
  }
};

/// Output files staged in memory, then written to temporaries and renamed
/// into place only once everything has been produced.
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }

  void commit() const {
    fs::create_directories(dir_);
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
      for (const auto& [name, content] : files_) {
        fs::path final_path = fs::path(dir_) / name;
        fs::path tmp = fs::path(dir_) / ("." + name + ".tmp");
        std::ofstream out(tmp, std::ios::binary);
        out << content;
        out.close();
        if (!out) throw Error("failed writing " + tmp.string());
        staged.emplace_back(tmp, final_path);
      }
      for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
    } catch (...) {
      for (const auto& [tmp, final_path] : staged) {
        std::error_code ec;
        fs::remove(tmp, ec);
      }
      throw;
    }
  }

 private:
  std::string dir_;
  std::map<std::string, std::string> files_;
};

std::string manifest_json(const std::string& command, const Settings& settings) {
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json checksums = nlohmann::json::object();
  for (const auto& [key, value] : settings.values) {
    if (kVolatileSettings.count(key)) continue;
    config[key] = value;
    if (kPathSettings.count(key) && !value.empty())
      checksums[key] = incongruity::detail::hex64(
          incongruity::detail::fnv1a64(incongruity::detail::read_file(value)));
  }
  nlohmann::json j = {{"tool", kToolVersion},
                      {"command", command},
                      {"config", std::move(config)},
                      {"checksums", std::move(checksums)}};
  return dump_json(j);
}

/// Config values from a manifest, after checking that every referenced file
/// still has the recorded checksum.
std::map<std::string, std::string> load_manifest(const std::string& path,
                                                 const std::string& command) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(incongruity::detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed manifest: " + e.what());
  }
  if (!j.contains("command") || j["command"] != command)
    throw Error(path + ": manifest was written by a different command");
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.at("config").items()) out[key] = value.get<std::string>();
  for (const auto& [key, sum] : j.at("checksums").items()) {
    auto file = out.at(key);
    auto now = incongruity::detail::hex64(
        incongruity::detail::fnv1a64(incongruity::detail::read_file(file)));
    if (now != sum.get<std::string>())
      throw Error(path + ": checksum mismatch for " + key + " (" + file + ")");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resource wiring

struct LoadedResources {
  FunctionWordLexicon function_words;
  std::optional<EmbeddingTable> embeddings;
  AntonymLexicon antonyms;
  std::optional<Taxonomy> taxonomy;
  std::unique_ptr<Completer> completer;
  std::unique_ptr<WordSimilarity> similarity;
  std::unique_ptr<WordSimilarity> selection;
  DetectionConfig config;

  Resources view() const {
    return Resources{function_words, *completer, *similarity, selection.get()};
  }
};

std::unique_ptr<WordSimilarity> make_similarity(const std::string& id, LoadedResources& r,
                                                bool antonym_override) {
  if (id == "embedding")
    return std::make_unique<EmbeddingSimilarity>(*r.embeddings, r.antonyms);
  if (id == "wordnet")
    return std::make_unique<WuPalmerSimilarity>(*r.taxonomy,
                                                antonym_override ? &r.antonyms : nullptr);
  throw Error("unknown similarity backend '" + id + "' (expected embedding or wordnet)");
}

LoadedResources load_resources(const Settings& s, const std::string& command,
                               bool need_threshold) {
  LoadedResources r;
  auto approach = parse_approach(s.get("approach"));
  if (!approach) throw Error("unknown approach '" + s.get("approach") + "'");
  r.config.approach = *approach;
  r.config.similarity = s.get("similarity");
  r.config.selection_similarity = s.get("selection-similarity");

  for (const auto& id : {r.config.similarity, r.config.selection_similarity})
    if (id != "embedding" && id != "wordnet")
      throw Error("unknown similarity backend '" + id + "' (expected embedding or wordnet)");

  r.function_words = load_function_words(s.require("function-words", command));
  const bool selecting = r.config.approach == Approach::incongruous_only;
  const bool need_embeddings = r.config.similarity == "embedding" ||
                               (selecting && r.config.selection_similarity == "embedding");
  const bool need_taxonomy = r.config.similarity == "wordnet" ||
                             (selecting && r.config.selection_similarity == "wordnet");
  if (need_embeddings) r.embeddings = load_embeddings(s.require("embeddings", command));
  if (need_taxonomy)
    r.taxonomy = load_taxonomy(s.require("taxonomy-edges", command),
                               s.require("taxonomy-lemmas", command));
  if (s.has("antonyms")) r.antonyms = load_antonyms(s.get("antonyms"));

  if (s.has("lm") == s.has("completion-table"))
    throw Error(command + " requires exactly one of --lm or --completion-table");
  if (s.has("lm")) {
    r.completer = std::make_unique<NGramCompleter>(load_ngram(s.get("lm")));
    r.config.completer = "ngram";
  } else {
    r.completer = std::make_unique<TableCompleter>(load_completion_table(s.get("completion-table")));
    r.config.completer = "table";
  }

  const bool override_on = s.flag("antonym-override");
  r.similarity = make_similarity(r.config.similarity, r, override_on);
  if (selecting) r.selection = make_similarity(r.config.selection_similarity, r, override_on);

  if (need_threshold) {
    s.require("threshold", command);
    r.config.threshold = s.number("threshold");
    r.config.validate(r.similarity->range());
  }
  return r;
}

unsigned jobs_of(const Settings& s) {
  auto j = s.integer("jobs");
  if (j < 1 || j > 1024) throw Error("--jobs must be between 1 and 1024");
  return static_cast<unsigned>(j);
}

std::string approach_title(Approach a, const std::string& similarity) {
  std::string out(to_string(a));
  return out + " / " + similarity;
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_train_lm(const Settings& s, Outputs& out) {
  std::vector<std::vector<std::string>> corpus;
  auto add_text = [&](std::string_view text) {
    std::vector<std::string> sentence;
    for (auto& t : tokenize(text)) sentence.push_back(std::move(t.surface));
    if (!sentence.empty()) corpus.push_back(std::move(sentence));
  };
  if (s.has("corpus") == s.has("data"))
    throw Error("train-lm requires exactly one of --corpus or --data");
  if (s.has("corpus")) {
    for (const auto& line : incongruity::detail::split_lines(
             incongruity::detail::read_file(s.get("corpus"))))
      add_text(line);
  } else {
    for (const auto& d : load_dataset(s.get("data")).documents) corpus.push_back(d.surfaces());
  }
  auto model = train_ngram(corpus, s.integer("order"));
  out.add("model.ngram", serialize_ngram(model));
}

std::vector<std::size_t> order_by_id(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.documents.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ds.documents[a].id() < ds.documents[b].id();
  });
  return idx;
}

void cmd_detect(const Settings& s, Outputs& out) {
  auto r = load_resources(s, "detect", true);
  auto ds = load_dataset(s.require("data", "detect"));
  auto results = score_dataset(ds, r.config, r.view(), jobs_of(s));
  std::string lines;
  std::vector<Prediction> labeled;
  std::size_t flagged = 0;
  for (std::size_t i : order_by_id(ds)) {
    auto j = to_json(results[i]);
    j["gold"] = std::string(to_string(ds.documents[i].label()));
    lines += j.dump() + "\n";
    flagged += results[i].predicted == Label::sarcastic;
    if (ds.documents[i].label() != Label::unlabeled)
      labeled.push_back({results[i].predicted, ds.documents[i].label()});
  }
  nlohmann::json summary = {{"documents", ds.documents.size()},
                            {"predicted_sarcastic", flagged},
                            {"threshold", r.config.threshold},
                            {"approach", std::string(to_string(r.config.approach))},
                            {"similarity", r.config.similarity}};
  summary["metrics"] = labeled.empty() ? nlohmann::json(nullptr) : to_json(compute_metrics(labeled));
  out.add("detections.jsonl", lines);
  out.add("summary.json", dump_json(summary));
}

void cmd_sweep(const Settings& s, Outputs& out) {
  auto r = load_resources(s, "sweep", false);
  auto ds = load_dataset(s.require("data", "sweep"));
  auto scored = to_scored(ds, score_dataset(ds, r.config, r.view(), jobs_of(s)));
  auto sweep = threshold_sweep(scored);
  out.add("sweep.json", dump_json(to_json(sweep)));
  out.add("sweep.csv", sweep_csv(sweep));
  out.add("sweep.txt", format_table("Approach / Similarity",
                                    {{approach_title(r.config.approach, r.config.similarity),
                                      format_threshold(sweep.best_threshold), sweep.best_metrics}}));
}

void cmd_crossval(const Settings& s, Outputs& out) {
  auto r = load_resources(s, "crossval", false);
  auto ds = load_dataset(s.require("data", "crossval"));
  auto report = two_fold_cv(ds, r.config, r.view(), s.integer("seed"), jobs_of(s));
  out.add("crossval.json", dump_json(to_json(report)));
  std::string best_t = "(" + format_threshold(report.folds[0].threshold) + ", " +
                       format_threshold(report.folds[1].threshold) + ")";
  std::vector<TableRow> rows = {
      {approach_title(r.config.approach, r.config.similarity), best_t, report.pooled}};
  for (const auto& f : report.folds)
    rows.push_back({"  fold train=" + std::to_string(f.train_split) + " test=" +
                        std::to_string(f.test_split),
                    format_threshold(f.threshold), f.test_metrics});
  out.add("crossval.txt", format_table("Approach / Similarity", rows));
}

void cmd_oracle_eval(const Settings& s, Outputs& out) {
  auto r = load_resources(s, "oracle-eval", false);
  auto ds = load_dataset(s.require("data", "oracle-eval"));
  auto cmp = oracle_comparison(ds, r.config, r.view(), jobs_of(s));
  out.add("oracle.json", dump_json(to_json(cmp)));
  out.add("oracle_all_words.csv", sweep_csv(cmp.all_words));
  out.add("oracle_exact_word.csv", sweep_csv(cmp.exact_word));
  out.add("oracle.txt",
          format_table("Approach", {{"All-words", format_threshold(cmp.all_words.best_threshold),
                                     cmp.all_words.best_metrics},
                                    {"Oracle", format_threshold(cmp.exact_word.best_threshold),
                                     cmp.exact_word.best_metrics}}));
}

void cmd_gen_synthetic(const Settings& s, Outputs& out) {
  auto bench = synthetic::generate(s.integer("seed"), s.integer("count"),
                                   s.number("sarcastic-fraction"));
  for (auto& [name, content] : bench.files()) out.add(name, content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sarcasm detection as expected-vs-observed word incongruity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::map<std::string, std::string> flag_values;
  std::string config_path, manifest_path;
  app.add_option("--config", config_path, "key = value settings file");
  app.add_option("--manifest", manifest_path, "re-run from a manifest.json");
  for (const auto& [key, def] : kSettings) {
    std::string help = "default: " + (def.empty() ? std::string("unset") : def) + "; env " + env_name(key);
    app.add_option("--" + key, flag_values[key], help);
  }
  app.fallthrough();

  const std::vector<std::pair<std::string, void (*)(const Settings&, Outputs&)>> commands = {
      {"train-lm", cmd_train_lm},       {"detect", cmd_detect},
      {"sweep", cmd_sweep},             {"crossval", cmd_crossval},
      {"oracle-eval", cmd_oracle_eval}, {"gen-synthetic", cmd_gen_synthetic}};
  std::map<std::string, CLI::App*> subs;
  subs["train-lm"] = app.add_subcommand("train-lm", "train an n-gram completion model");
  subs["detect"] = app.add_subcommand("detect", "score a dataset at a fixed threshold");
  subs["sweep"] = app.add_subcommand("sweep", "threshold sweep over a dataset");
  subs["crossval"] = app.add_subcommand("crossval", "two-fold threshold cross-validation");
  subs["oracle-eval"] = app.add_subcommand("oracle-eval", "all-words vs exact-word comparison");
  subs["gen-synthetic"] = app.add_subcommand("gen-synthetic", "write the planted-incongruity benchmark");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    std::string command;
    void (*run)(const Settings&, Outputs&) = nullptr;
    for (const auto& [name, fn] : commands)
      if (subs[name]->parsed()) {
        command = name;
        run = fn;
      }

    Settings settings;
    for (const auto& [key, def] : kSettings) settings.values[key] = def;
    if (!config_path.empty() && !manifest_path.empty())
      throw Error("--config and --manifest are mutually exclusive");
    std::map<std::string, std::string> file_values;
    if (!config_path.empty()) file_values = parse_config_file(config_path);
    if (!manifest_path.empty()) file_values = load_manifest(manifest_path, command);
    for (const auto& [key, value] : file_values) {
      if (!settings.values.count(key)) throw Error("unknown setting '" + key + "'");
      settings.values[key] = value;
    }
    for (const auto& [key, def] : kSettings)
      if (const char* env = std::getenv(env_name(key).c_str())) settings.values[key] = env;
    for (const auto& [key, def] : kSettings)
      if (app.get_option("--" + key)->count() > 0) settings.values[key] = flag_values[key];

    Outputs out(settings.require("out", command));
    run(settings, out);
    out.add("manifest.json", manifest_json(command, settings));
    out.commit();
  } catch (const std::exception& e) {
    std::cerr << "incongruity: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
