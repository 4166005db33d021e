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

#include <span>
#include <string>
#include <vector>

#include "micode/classifier.hpp"
#include "micode/corpus.hpp"
#include "micode/label_store.hpp"
#include "micode/registry.hpp"

namespace micode {

struct Suggestion {
  MiCode code = MiCode::Other;
  double confidence = 0.0;
  std::string model_id;
};

struct QueueItem {
  std::string utterance_id;
  std::string conversation_id;
  std::string context_preview;
  std::vector<Suggestion> suggestions;  // descending confidence
  double max_confidence = 0.0;
};

struct SuggestionQueue {
  double threshold = 0.7;
  std::size_t k = 1;
  std::vector<QueueItem> items;  // descending max confidence, then utterance id
};

inline constexpr double kDefaultSuggestThreshold = 0.7;
inline constexpr double kDefaultLabelThreshold = 0.5;

// Pure queue construction from precomputed scores: keeps codes scoring
// >= threshold and drops utterances with none.
SuggestionQueue build_queue(std::span<const ContextualUtterance> items, std::span<const CodeScores> scores,
                            const std::array<std::string, kNumCodes>& model_ids, double threshold, std::size_t k);

// Scores `unlabeled` with the registry at k. Every item must have been built
// with the same k (ModelError otherwise).
SuggestionQueue suggest(const ModelRegistry& registry, std::span<const ContextualUtterance> unlabeled,
                        double threshold = kDefaultSuggestThreshold, std::size_t k = 1);

// Drops items whose utterance has since been verified.
void drop_verified(SuggestionQueue& queue, const LabelView& view);

// Listener utterances without any human record, as contexts of size k.
std::vector<ContextualUtterance> unverified_listener_contexts(const Corpus& corpus, const LabelView& view,
                                                              std::size_t k);

// Validates and appends a human decision. Errors: DataError codes
// "too_many_codes", "no_codes", "unknown_code", "unknown_utterance",
// "missing_annotator".
AppendOutcome record_decision(LabelStore& store, const Corpus& corpus, std::string_view utterance_id,
                              std::string_view annotator_id, std::span<const std::string> codes,
                              Instant decided_at = now_utc());

// {context_text, is_positive} pairs for one code from the human records,
// resolved with consensus precedence.
std::vector<LabeledContext> export_training_set(const Corpus& corpus, const LabelView& view, MiCode code,
                                                std::size_t k);
void write_training_set(const std::filesystem::path& path, std::span<const LabeledContext> examples);

}  // namespace micode
