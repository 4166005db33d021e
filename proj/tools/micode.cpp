// Copyright 2026 The micode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "micode/agreement.hpp"
#include "micode/corpus.hpp"
#include "micode/error.hpp"
#include "micode/label_store.hpp"
#include "micode/pipeline.hpp"
#include "micode/registry.hpp"
#include "micode/satisfaction.hpp"
#include "micode/service.hpp"
#include "micode/simgen.hpp"
#include "micode/suggest.hpp"
#include "micode/topwords.hpp"
#include "micode/trends.hpp"

namespace fs = std::filesystem;
using namespace micode;

namespace {

struct Options {
  std::string input, labels, model_labels, models, out;
  std::size_t k = 1;
  double suggest_threshold = kDefaultSuggestThreshold;
  double label_threshold = kDefaultLabelThreshold;
  std::uint64_t seed = 1;
  double min_span_days = 365.0;
  std::size_t min_sessions = 500;
  std::size_t min_utterances = 50;
  bool strict = false;
  bool temporal_past = false;
  std::string preset = "default";
  std::optional<std::size_t> conversations;
  std::size_t top_n = 5;
  std::size_t sample = 100;
  std::string host = "127.0.0.1";
  int port = 8080;
  int epochs = 20;
  double l2 = 1e-4;
  double learning_rate = 0.5;
};

// Falls back to $MICODE_DATA_DIR/<name> when the flag was not given.
std::string resolve(const std::string& value, const char* flag, const char* default_name) {
  if (!value.empty()) return value;
  if (const char* dir = std::getenv("MICODE_DATA_DIR"); dir && *dir) return (fs::path(dir) / default_name).string();
  throw UsageError("missing_flag", fmt::format("{} is required (or set MICODE_DATA_DIR)", flag));
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("io_error", fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw DataError("io_error", fmt::format("write failed for '{}'", path.string()));
  }
  fs::rename(tmp, path);
}

Corpus load_corpus(const Options& o) {
  auto parsed = parse_corpus(resolve(o.input, "--input", "corpus.jsonl"), o.strict);
  for (const auto& issue : parsed.issues)
    std::cerr << nlohmann::json{{"warning", issue.message}, {"line", issue.line}}.dump() << '\n';
  return std::move(parsed.corpus);
}

std::vector<LabelRecord> load_labels(const Options& o) {
  return read_label_file(resolve(o.labels, "--labels", "labels.jsonl"));
}

LabelMap load_label_map(const Options& o) { return resolve_labels(load_labels(o)); }

ModelRegistry load_models(const Options& o) { return ModelRegistry::load(resolve(o.models, "--models", "models")); }

fs::path out_dir(const Options& o) { return resolve(o.out, "--out", "reports"); }

// Human-readable report to stdout and <out>/<stem>.txt, machine-readable to <out>/<stem>.tsv.
void emit_report(const Options& o, const std::string& stem, const std::string& text, const std::string& tsv) {
  std::cout << text;
  const auto dir = out_dir(o);
  write_file(dir / (stem + ".txt"), text);
  write_file(dir / (stem + ".tsv"), tsv);
}

Hyper hyper_of(const Options& o) {
  Hyper h;
  h.epochs = o.epochs;
  h.l2_penalty = o.l2;
  h.learning_rate = o.learning_rate;
  h.seed = o.seed;
  return h;
}

void check_k(std::size_t k) {
  if (k != 0 && k != 1 && k != 5) throw UsageError("bad_k", "--k must be 0, 1 or 5");
}

void check_unit(double v, const char* flag) {
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError("bad_threshold", fmt::format("{} must lie in [0,1]", flag));
}

int cmd_ingest(const Options& o) {
  auto parsed = parse_corpus(resolve(o.input, "--input", "raw.jsonl"), o.strict);
  for (const auto& issue : parsed.issues)
    std::cerr << nlohmann::json{{"warning", issue.message}, {"line", issue.line}}.dump() << '\n';
  const fs::path out = resolve(o.out, "--out", "corpus.jsonl");
  std::ostringstream ss;
  write_corpus(ss, parsed.corpus);
  write_file(out, ss.str());
  std::cout << fmt::format("conversations {}\nutterances {}\nskipped_records {}\n", parsed.corpus.size(),
                           parsed.corpus.utterance_count(), parsed.skipped_records);
  return 0;
}

int cmd_simgen(const Options& o) {
  auto spec = preset(o.preset, o.seed);
  if (o.conversations) spec.n_conversations = *o.conversations;
  const auto g = generate_corpus(spec);
  const fs::path dir = resolve(o.out, "--out", "simgen");
  write_generated(g, dir);
  std::cout << fmt::format("preset {}\nseed {}\nconversations {}\nutterances {}\nlabel_records {}\n", o.preset,
                           o.seed, g.corpus.size(), g.corpus.utterance_count(), g.labels.size());
  return 0;
}

int cmd_train(const Options& o) {
  check_k(o.k);
  const auto corpus = load_corpus(o);
  const auto labels = load_label_map(o);
  TrainOptions opt;
  opt.context_sizes = {o.k};
  opt.hyper = hyper_of(o);
  opt.seed = o.seed;
  const fs::path models = resolve(o.models, "--models", "models");
  ModelRegistry base;
  if (fs::exists(models / "registry.json")) base = ModelRegistry::load(models);
  const auto outcome = train_models(corpus, labels, opt, base);
  outcome.registry.save(models);
  for (const auto& [code, k] : outcome.skipped)
    std::cerr << nlohmann::json{{"warning", "single-class training set; model not trained"},
                                {"code", code_name(code)},
                                {"k", k}}
                     .dump()
              << '\n';
  std::string text = fmt::format("Held-out positive-class scores ({} labeled listener utterances, 20% test)\n",
                                 outcome.examples) +
                     eval_table(outcome.evals);
  if (o.out.empty()) {
    std::cout << text;
    write_file(models / "eval.txt", text);
    write_file(models / "eval.tsv", eval_tsv(outcome.evals));
  } else {
    emit_report(o, "eval", text, eval_tsv(outcome.evals));
  }
  return 0;
}

int cmd_label(const Options& o) {
  check_k(o.k);
  check_unit(o.label_threshold, "--label-threshold");
  const auto corpus = load_corpus(o);
  const auto registry = load_models(o);
  const auto records = label_corpus(corpus, registry, o.k, o.label_threshold, now_utc());
  const fs::path out = resolve(o.out, "--out", "model_labels.jsonl");
  std::string content;
  for (const auto& r : records) content += to_json_line(r) + "\n";
  write_file(out, content);
  std::size_t empty = 0;
  for (const auto& r : records) empty += r.codes.empty();
  std::cout << fmt::format("labeled {}\nwithout_codes {}\n", records.size(), empty);
  return 0;
}

int cmd_evaluate(const Options& o) {
  check_k(o.k);
  check_unit(o.label_threshold, "--label-threshold");
  const auto corpus = load_corpus(o);
  const auto labels = load_label_map(o);
  const auto registry = load_models(o);
  std::vector<EvalReport> evals;
  for (auto code : kAllCodes) {
    const auto* entry = registry.find(code, o.k);
    if (!entry) continue;
    const auto* native = std::get_if<std::shared_ptr<const CodeClassifier>>(&entry->model);
    if (!native) continue;
    evals.push_back(evaluate(**native, labeled_contexts(corpus, labels, code, o.k), o.label_threshold));
  }
  if (evals.empty()) throw ModelError("models_missing", fmt::format("no native models for k={}", o.k));
  emit_report(o, "evaluate", "Positive-class scores on the given labels\n" + eval_table(evals), eval_tsv(evals));
  return 0;
}

int cmd_agree(const Options& o) {
  const auto view = LabelStore::replay(load_labels(o));
  const auto report = agreement_report(view);
  if (o.out.empty() && !std::getenv("MICODE_DATA_DIR")) {
    std::cout << agreement_table(report);
    return 0;
  }
  emit_report(o, "agreement", agreement_table(report), agreement_tsv(report));
  return 0;
}

int cmd_suggest(const Options& o) {
  check_k(o.k);
  check_unit(o.suggest_threshold, "--suggest-threshold");
  const auto corpus = load_corpus(o);
  const auto view = LabelStore::replay(load_labels(o));
  const auto registry = load_models(o);
  const auto contexts = unverified_listener_contexts(corpus, view, o.k);
  const auto queue = suggest(registry, contexts, o.suggest_threshold, o.k);
  std::string content;
  for (const auto& item : queue.items) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& sg : item.suggestions)
      s.push_back({{"code", code_name(sg.code)}, {"confidence", sg.confidence}, {"model_id", sg.model_id}});
    content += nlohmann::json{{"utterance_id", item.utterance_id},
                              {"conversation_id", item.conversation_id},
                              {"suggestions", s}}
                   .dump() +
               "\n";
  }
  write_file(resolve(o.out, "--out", "queue.jsonl"), content);
  std::cout << fmt::format("candidates {}\nqueued {}\nthreshold {}\n", contexts.size(), queue.items.size(),
                           o.suggest_threshold);
  return 0;
}

int cmd_satisfy(const Options& o) {
  const auto corpus = load_corpus(o);
  const auto labels = load_label_map(o);
  const auto design =
      build_design(corpus, labels, o.temporal_past ? PastRatingMode::Temporal : PastRatingMode::LeaveCurrentOut);
  const auto fit = fit_weighted_logistic(design.rows, class_weights(design.rows));
  emit_report(o, "satisfaction", satisfaction_table(fit, &design), satisfaction_tsv(fit, &design));
  return 0;
}

Corpus cohort(const Options& o, const Corpus& corpus) {
  return active_listener_cohort(corpus, o.min_span_days, o.min_sessions, o.min_utterances);
}

int cmd_trends(const Options& o) {
  const auto corpus = load_corpus(o);
  const auto labels = load_label_map(o);
  const auto joins = listener_join_times(corpus);
  const auto active = cohort(o, corpus);
  if (active.empty()) throw DataError("empty_cohort", "no conversations pass the active-listener filters");
  const auto series = code_fraction_by_bucket(active, labels, &joins);
  emit_report(o, "trends", trend_table(series), trend_tsv(series));
  write_file(out_dir(o) / "trends.svg", trend_svg(series));
  return 0;
}

int cmd_corr(const Options& o) {
  const auto corpus = load_corpus(o);
  const auto labels = load_label_map(o);
  const auto active = cohort(o, corpus);
  if (active.empty()) throw DataError("empty_cohort", "no conversations pass the active-listener filters");
  const auto dir = out_dir(o);
  const std::array<CorrMatrix, 3> mats = {cooccurrence_matrix(active, labels), conversation_corr(active, labels),
                                          listener_corr(active, labels)};
  for (const auto& m : mats) {
    const auto tsv = corr_tsv(m);
    write_file(dir / fmt::format("corr_{}.tsv", level_name(m.level)), tsv);
    std::cout << fmt::format("{} level: {} variables, n={}, undefined={}\n", level_name(m.level), m.size(), m.n,
                             m.undefined_variables().size());
  }
  return 0;
}

int cmd_topwords(const Options& o) {
  const auto corpus = load_corpus(o);
  const auto report = top_words(corpus, load_label_map(o), o.top_n);
  emit_report(o, "topwords", topwords_table(report), topwords_tsv(report));
  return 0;
}

int cmd_validate(const Options& o) {
  const auto view = LabelStore::replay(load_labels(o));
  const auto model = resolve_labels(read_label_file(resolve(o.model_labels, "--model-labels", "model_labels.jsonl")));
  const auto report = validation_sample(view, model, o.sample, o.seed);
  emit_report(o, "validation", validation_table(report), validation_tsv(report));
  return 0;
}

int cmd_serve(const Options& o) {
  check_k(o.k);
  ServiceConfig cfg;
  cfg.corpus_path = resolve(o.input, "--input", "corpus.jsonl");
  cfg.label_log_path = resolve(o.labels, "--labels", "labels.jsonl");
  cfg.models_dir = resolve(o.models, "--models", "models");
  cfg.k = o.k;
  cfg.suggest_threshold = o.suggest_threshold;
  cfg.label_threshold = o.label_threshold;
  cfg.seed = o.seed;
  cfg.hyper = hyper_of(o);
  Service service(cfg);
  HttpServer http(service);
  std::cerr << nlohmann::json{{"listening", fmt::format("{}:{}", o.host, o.port)}}.dump() << '\n';
  http.run(o.host, o.port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"micode: MI code labeling and analysis"};
  app.require_subcommand(1);
  Options o;

  auto add_input = [&](CLI::App* c) { c->add_option("--input", o.input, "Corpus JSONL"); };
  auto add_labels = [&](CLI::App* c) { c->add_option("--labels", o.labels, "Label records JSONL"); };
  auto add_models = [&](CLI::App* c) { c->add_option("--models", o.models, "Model registry directory"); };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Output path"); };
  auto add_k = [&](CLI::App* c) { c->add_option("--k", o.k, "Context size (0, 1 or 5)"); };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Seed for every random choice"); };
  auto add_strict = [&](CLI::App* c) { c->add_flag("--strict", o.strict, "Fail on the first malformed record"); };
  auto add_cohort = [&](CLI::App* c) {
    c->add_option("--min-span-days", o.min_span_days, "Active listener: minimum activity span");
    c->add_option("--min-sessions", o.min_sessions, "Active listener: minimum conversations");
    c->add_option("--min-utterances", o.min_utterances, "Minimum conversation length");
  };
  auto add_train = [&](CLI::App* c) {
    c->add_option("--epochs", o.epochs, "SGD epochs");
    c->add_option("--l2", o.l2, "L2 penalty");
    c->add_option("--learning-rate", o.learning_rate, "Initial SGD step size");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate and normalize a transcript file");
  add_input(ingest), add_out(ingest), add_strict(ingest);

  auto* simgen = app.add_subcommand("simgen", "Generate a synthetic corpus with known ground truth");
  simgen->add_option("--preset", o.preset, "Generator preset")->check(CLI::IsMember(preset_names()));
  simgen->add_option("--conversations", o.conversations, "Override the number of conversations");
  add_seed(simgen), add_out(simgen);

  auto* train = app.add_subcommand("train", "Train one-vs-all classifiers");
  add_input(train), add_labels(train), add_models(train), add_k(train), add_seed(train), add_out(train),
      add_strict(train), add_train(train);

  auto* label = app.add_subcommand("label", "Label every listener utterance with the models");
  add_input(label), add_models(label), add_k(label), add_out(label), add_strict(label);
  label->add_option("--label-threshold", o.label_threshold, "Probability needed to assign a code");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score models against labels");
  add_input(evaluate_cmd), add_labels(evaluate_cmd), add_models(evaluate_cmd), add_k(evaluate_cmd),
      add_out(evaluate_cmd), add_strict(evaluate_cmd);
  evaluate_cmd->add_option("--label-threshold", o.label_threshold, "Decision threshold");

  auto* agree = app.add_subcommand("agree", "Per-code Krippendorff alpha between human annotators");
  add_labels(agree), add_out(agree);

  auto* suggest_cmd = app.add_subcommand("suggest", "Build the verification queue");
  add_input(suggest_cmd), add_labels(suggest_cmd), add_models(suggest_cmd), add_k(suggest_cmd),
      add_out(suggest_cmd), add_strict(suggest_cmd);
  suggest_cmd->add_option("--suggest-threshold", o.suggest_threshold, "Minimum confidence for a suggestion");

  auto* satisfy = app.add_subcommand("satisfy", "Weighted logistic regression of satisfaction on code counts");
  add_input(satisfy), add_labels(satisfy), add_out(satisfy), add_strict(satisfy), add_seed(satisfy);
  satisfy->add_flag("--temporal-past", o.temporal_past, "Past rating from strictly earlier conversations only");

  auto* trends = app.add_subcommand("trends", "Code usage by listener tenure");
  add_input(trends), add_labels(trends), add_out(trends), add_cohort(trends), add_strict(trends);

  auto* corr = app.add_subcommand("corr", "Correlation matrices at three levels");
  add_input(corr), add_labels(corr), add_out(corr), add_cohort(corr), add_strict(corr);

  auto* topwords = app.add_subcommand("topwords", "TF-IDF top words per code");
  add_input(topwords), add_labels(topwords), add_out(topwords), add_strict(topwords);
  topwords->add_option("--n", o.top_n, "Words per code");

  auto* validate = app.add_subcommand("validate", "Alpha between humans and model labels on a sample");
  add_labels(validate), add_out(validate), add_seed(validate);
  validate->add_option("--model-labels", o.model_labels, "Model label records");
  validate->add_option("--sample", o.sample, "Number of utterances to sample");

  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  add_input(serve), add_labels(serve), add_models(serve), add_k(serve), add_seed(serve), add_train(serve);
  serve->add_option("--suggest-threshold", o.suggest_threshold, "Minimum confidence for a suggestion");
  serve->add_option("--label-threshold", o.label_threshold, "Probability needed to assign a code");
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::vector<std::pair<CLI::App*, int (*)(const Options&)>> table = {
      {ingest, cmd_ingest},     {simgen, cmd_simgen},     {train, cmd_train},       {label, cmd_label},
      {evaluate_cmd, cmd_evaluate}, {agree, cmd_agree},   {suggest_cmd, cmd_suggest}, {satisfy, cmd_satisfy},
      {trends, cmd_trends},     {corr, cmd_corr},         {topwords, cmd_topwords}, {validate, cmd_validate},
      {serve, cmd_serve},
  };
  auto fail = [](const Error& e, int rc) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"code", e.code()}}.dump() << '\n';
    return rc;
  };
  try {
    for (const auto& [cmd, fn] : table)
      if (cmd->parsed()) return fn(o);
  } catch (const UsageError& e) {
    return fail(e, 2);
  } catch (const Error& e) {
    return fail(e, 1);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"code", "internal"}}.dump() << '\n';
    return 1;
  }
  return 2;
}
