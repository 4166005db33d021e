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

#include "micode/pipeline.hpp"

#include <exception>

#include <fmt/format.h>

#include "micode/error.hpp"
#include "micode/kernels.hpp"
#include "micode/random.hpp"

namespace micode {

namespace {

struct Example {
  const Conversation* conv;
  std::size_t position;
  CodeSet codes;
};

std::vector<Example> labeled_listener_utterances(const Corpus& corpus, const LabelMap& labels) {
  std::vector<Example> out;
  for (const auto& c : corpus.conversations())
    for (std::size_t p = 0; p < c.utterances.size(); ++p) {
      if (c.utterances[p].speaker != SpeakerRole::Listener) continue;
      if (auto it = labels.find(c.utterances[p].utterance_id); it != labels.end()) out.push_back({&c, p, it->second});
    }
  return out;
}

}  // namespace

std::vector<LabeledContext> labeled_contexts(const Corpus& corpus, const LabelMap& labels, MiCode code,
                                             std::size_t k) {
  std::vector<LabeledContext> out;
  for (const auto& e : labeled_listener_utterances(corpus, labels))
    out.push_back({build_context(*e.conv, e.position, k), e.codes.contains(code)});
  return out;
}

TrainOutcome train_models(const Corpus& corpus, const LabelMap& labels, const TrainOptions& options,
                          const ModelRegistry& base) {
  const auto examples = labeled_listener_utterances(corpus, labels);
  if (examples.empty()) throw DataError("no_training_data", "no labeled listener utterances to train on");
  TrainOutcome outcome;
  outcome.registry = base;
  outcome.examples = examples.size();

  for (std::size_t k : options.context_sizes) {
    std::vector<ContextualUtterance> contexts;
    std::vector<std::string> texts;
    contexts.reserve(examples.size());
    texts.reserve(examples.size());
    for (const auto& e : examples) {
      contexts.push_back(build_context(*e.conv, e.position, k));
      texts.push_back(contexts.back().context_text);
    }
    const auto features = kernels::featurize_parallel(texts);

    const auto n_codes = options.codes.size();
    std::vector<std::optional<CodeClassifier>> models(n_codes);
    std::vector<std::optional<EvalReport>> evals(n_codes);
    std::vector<std::exception_ptr> errors(n_codes);
    std::vector<char> single(n_codes, 0);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t ci = 0; ci < n_codes; ++ci) {
      try {
        const MiCode code = options.codes[ci];
        std::unique_ptr<bool[]> y(new bool[examples.size()]);
        for (std::size_t i = 0; i < examples.size(); ++i) y[i] = examples[i].codes.contains(code);
        const auto split = stratified_split(std::span<const bool>(y.get(), examples.size()), options.test_fraction,
                                            derive_seed(options.seed, "split", index_of(code) * 64 + k));
        std::vector<FeaturizedExample> train, test;
        std::vector<LabeledContext> train_ctx;
        for (auto i : split.train) {
          train.push_back({features[i], y[i]});
          train_ctx.push_back({contexts[i], y[i]});
        }
        for (auto i : split.test) test.push_back({features[i], y[i]});
        Hyper h = options.hyper;
        h.seed = derive_seed(options.seed, "sgd", index_of(code) * 64 + k);
        try {
          auto model = train_code_classifier(train, code, k, h, training_set_hash(train_ctx));
          evals[ci] = evaluate(model, test);
          models[ci].emplace(std::move(model));
        } catch (const DataError& e) {
          if (e.code() != "single_class") throw;
          single[ci] = 1;
        }
      } catch (...) {
        errors[ci] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    for (std::size_t ci = 0; ci < n_codes; ++ci) {
      const MiCode code = options.codes[ci];
      if (single[ci]) {
        outcome.skipped.emplace_back(code, k);
        continue;
      }
      RegistryEntry entry;
      entry.meta.model_id = fmt::format("{}.k{}.{:016x}", code_name(code), k, models[ci]->training_set_hash());
      entry.meta.trained_at = options.trained_at;
      entry.meta.training_set_hash = models[ci]->training_set_hash();
      entry.meta.eval = evals[ci];
      entry.model = std::make_shared<const CodeClassifier>(std::move(*models[ci]));
      outcome.registry.put(code, k, std::move(entry));
      outcome.evals.push_back(*evals[ci]);
    }
  }
  return outcome;
}

std::string eval_table(const std::vector<EvalReport>& evals) {
  std::string out = fmt::format("{:<24} {:>3} {:>9} {:>9} {:>9} {:>8}\n", "MI Code", "k", "Precision", "Recall",
                                "F1", "Support");
  for (const auto& e : evals)
    out += fmt::format("{:<24} {:>3} {:>9.4f} {:>9.4f} {:>9.4f} {:>8}\n", display_name(e.code), e.k, e.precision,
                       e.recall, e.f1, e.support);
  return out;
}

std::string eval_tsv(const std::vector<EvalReport>& evals) {
  std::string out = "code\tk\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\tsupport\n";
  for (const auto& e : evals)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\t{}\n", code_name(e.code), e.k, e.tp, e.fp,
                       e.fn, e.tn, e.precision, e.recall, e.f1, e.support);
  return out;
}

std::vector<LabelRecord> label_corpus(const Corpus& corpus, const ModelRegistry& registry, std::size_t k,
                                      double threshold, Instant decided_at) {
  if (!registry.complete_for(k))
    throw ModelError("models_missing", fmt::format("registry has no complete model set for k={}", k));
  std::vector<ContextualUtterance> batch;
  for (const auto& c : corpus.conversations())
    for (std::size_t p = 0; p < c.utterances.size(); ++p)
      if (c.utterances[p].speaker == SpeakerRole::Listener) batch.push_back(build_context(c, p, k));
  const auto sets = predict_labels_batch(registry, batch, threshold);
  const LabelSource source{LabelSource::Kind::Model, fmt::format("ova-k{}", k)};
  std::vector<LabelRecord> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    LabelRecord r{batch[i].target.utterance_id, source, sets[i].codes, Confidences{}, decided_at};
    for (auto code : sets[i].codes.to_vector()) r.confidence[index_of(code)] = sets[i].confidence[index_of(code)];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace micode
