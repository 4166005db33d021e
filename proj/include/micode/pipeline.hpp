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

#pragma once

#include <string>
#include <vector>

#include "micode/classifier.hpp"
#include "micode/corpus.hpp"
#include "micode/labels.hpp"
#include "micode/registry.hpp"

namespace micode {

struct TrainOptions {
  std::vector<std::size_t> context_sizes{1};
  std::vector<MiCode> codes{kAllCodes.begin(), kAllCodes.end()};
  Hyper hyper;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  Instant trained_at = now_utc();
};

struct TrainOutcome {
  ModelRegistry registry;
  std::vector<EvalReport> evals;
  std::vector<std::pair<MiCode, std::size_t>> skipped;  // single-class training sets
  std::size_t examples = 0;
};

// Listener utterances present in `labels`, as contexts of size k.
std::vector<LabeledContext> labeled_contexts(const Corpus& corpus, const LabelMap& labels, MiCode code,
                                             std::size_t k);

// One model per (code, k), trained on a seeded stratified 80% of the
// labeled listener utterances and evaluated on the rest. Models are added
// to (a copy of) `base`.
TrainOutcome train_models(const Corpus& corpus, const LabelMap& labels, const TrainOptions& options,
                          const ModelRegistry& base = {});

std::string eval_table(const std::vector<EvalReport>& evals);
std::string eval_tsv(const std::vector<EvalReport>& evals);

// Model label records for every listener utterance, predicted at k with the
// given threshold. The source is model:ova-k<k>.
std::vector<LabelRecord> label_corpus(const Corpus& corpus, const ModelRegistry& registry, std::size_t k,
                                      double threshold, Instant decided_at);

}  // namespace micode
