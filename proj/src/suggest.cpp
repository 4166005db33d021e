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

#include "micode/suggest.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "micode/error.hpp"
#include "micode/text.hpp"

namespace micode {

namespace {

std::string preview(std::string_view text, std::size_t max_bytes = 280) {
  if (text.size() <= max_bytes) return std::string(text);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return std::string(text.substr(0, cut)) + "…";
}

}  // namespace

SuggestionQueue build_queue(std::span<const ContextualUtterance> items, std::span<const CodeScores> scores,
                            const std::array<std::string, kNumCodes>& model_ids, double threshold, std::size_t k) {
  if (items.size() != scores.size()) throw UsageError("size_mismatch", "items and scores differ in length");
  SuggestionQueue q;
  q.threshold = threshold;
  q.k = k;
  for (std::size_t i = 0; i < items.size(); ++i) {
    QueueItem item;
    for (auto c : kAllCodes) {
      const double p = scores[i][index_of(c)];
      if (p >= threshold) item.suggestions.push_back({c, p, model_ids[index_of(c)]});
    }
    if (item.suggestions.empty()) continue;
    std::stable_sort(item.suggestions.begin(), item.suggestions.end(),
                     [](const Suggestion& a, const Suggestion& b) { return a.confidence > b.confidence; });
    item.max_confidence = item.suggestions.front().confidence;
    item.utterance_id = items[i].target.utterance_id;
    item.conversation_id = items[i].target.conversation_id;
    item.context_preview = preview(items[i].context_text);
    q.items.push_back(std::move(item));
  }
  std::sort(q.items.begin(), q.items.end(), [](const QueueItem& a, const QueueItem& b) {
    if (a.max_confidence != b.max_confidence) return a.max_confidence > b.max_confidence;
    return a.utterance_id < b.utterance_id;
  });
  return q;
}

SuggestionQueue suggest(const ModelRegistry& registry, std::span<const ContextualUtterance> unlabeled,
                        double threshold, std::size_t k) {
  for (const auto& cu : unlabeled)
    if (cu.k != k) throw ModelError("k_mismatch", fmt::format("utterance context built with k={}, queue k={}", cu.k, k));
  std::array<std::string, kNumCodes> ids;
  for (auto c : kAllCodes) {
    const auto* e = registry.find(c, k);
    if (!e) throw ModelError("missing_model", fmt::format("no model for {} at k={}", code_name(c), k));
    ids[index_of(c)] = e->meta.model_id;
  }
  const auto scores = score_batch(registry, unlabeled);
  return build_queue(unlabeled, scores, ids, threshold, k);
}

void drop_verified(SuggestionQueue& queue, const LabelView& view) {
  std::erase_if(queue.items, [&](const QueueItem& item) { return view.verified.count(item.utterance_id) > 0; });
}

std::vector<ContextualUtterance> unverified_listener_contexts(const Corpus& corpus, const LabelView& view,
                                                              std::size_t k) {
  std::vector<ContextualUtterance> out;
  for (const auto& conv : corpus.conversations())
    for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
      const auto& u = conv.utterances[i];
      if (u.speaker == SpeakerRole::Listener && !view.verified.count(u.utterance_id))
        out.push_back(build_context(conv, i, k));
    }
  return out;
}

AppendOutcome record_decision(LabelStore& store, const Corpus& corpus, std::string_view utterance_id,
                              std::string_view annotator_id, std::span<const std::string> codes, Instant decided_at) {
  if (annotator_id.empty()) throw DataError("missing_annotator", "annotator_id is required");
  if (codes.empty()) throw DataError("no_codes", "at least one code is required");
  if (codes.size() > 3) throw DataError("too_many_codes", "max 3 codes");
  LabelRecord r;
  for (const auto& name : codes) {
    const auto code = parse_code(name);
    if (!code) throw DataError("unknown_code", fmt::format("unknown code '{}'", name));
    r.codes.insert(*code);
  }
  if (!corpus.find_utterance(utterance_id))
    throw DataError("unknown_utterance", fmt::format("unknown utterance '{}'", utterance_id));
  r.utterance_id = std::string(utterance_id);
  r.source = LabelSource{LabelSource::Kind::Human, std::string(annotator_id)};
  r.decided_at = decided_at;
  return store.append(std::move(r));
}

std::vector<LabeledContext> export_training_set(const Corpus& corpus, const LabelView& view, MiCode code,
                                                std::size_t k) {
  const auto resolved = resolve_labels(view.human_records());
  std::vector<LabeledContext> out;
  for (const auto& conv : corpus.conversations())
    for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
      const auto& u = conv.utterances[i];
      if (u.speaker != SpeakerRole::Listener) continue;
      auto it = resolved.find(u.utterance_id);
      if (it == resolved.end()) continue;
      out.push_back({build_context(conv, i, k), it->second.contains(code)});
    }
  return out;
}

void write_training_set(const std::filesystem::path& path, std::span<const LabeledContext> examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("unwritable_file", fmt::format("cannot write '{}'", path.string()));
  for (const auto& e : examples)
    out << nlohmann::json{{"context_text", e.cu.context_text}, {"is_positive", e.is_positive}}.dump() << '\n';
}

}  // namespace micode
