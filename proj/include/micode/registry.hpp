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

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "micode/classifier.hpp"
#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/time.hpp"

namespace micode {

// A model served over HTTP: POST {base_url}/predict.
struct ExternalModelRef {
  std::string base_url;  // e.g. "http://127.0.0.1:8090"
  std::string model_id;
  double timeout_seconds = 10.0;
};

struct ModelMetadata {
  std::string model_id;
  Instant trained_at;
  std::uint64_t training_set_hash = 0;
  std::optional<EvalReport> eval;
};

using ModelHandle = std::variant<std::shared_ptr<const CodeClassifier>, ExternalModelRef>;

struct RegistryEntry {
  ModelHandle model;
  ModelMetadata meta;
};

// At most one active model per (code, k). Copies share the immutable
// classifiers, so a copy is a cheap snapshot.
class ModelRegistry {
 public:
  void put(MiCode code, std::size_t k, RegistryEntry entry);
  const RegistryEntry* find(MiCode code, std::size_t k) const;
  bool complete_for(std::size_t k) const;
  std::vector<std::size_t> context_sizes() const;
  const std::map<std::pair<MiCode, std::size_t>, RegistryEntry>& entries() const noexcept { return entries_; }

  // registry.json plus one .model file per native classifier; written via
  // temporary files and renames.
  void save(const std::filesystem::path& dir) const;
  static ModelRegistry load(const std::filesystem::path& dir);

 private:
  std::map<std::pair<MiCode, std::size_t>, RegistryEntry> entries_;
};

using CodeScores = std::array<double, kNumCodes>;

struct LabelSet {
  CodeSet codes;
  CodeScores confidence{};  // probability for every code
};

// Every code whose probability is >= threshold. Throws ModelError when a
// code has no model at cu.k.
LabelSet predict_labels(const ModelRegistry& registry, const ContextualUtterance& cu, double threshold = 0.5);
// Batched form; native models are scored with the OpenMP kernels and
// external models in one request per endpoint.
std::vector<LabelSet> predict_labels_batch(const ModelRegistry& registry, std::span<const ContextualUtterance> batch,
                                           double threshold = 0.5);
// Scores only, for all codes.
std::vector<CodeScores> score_batch(const ModelRegistry& registry, std::span<const ContextualUtterance> batch);

using ExternalScores = std::array<std::optional<double>, kNumCodes>;

// POST /predict {k, items:[{utterance_id, context_text}]} and validate the
// reply. Network failures and timeouts throw RetriableError; malformed
// replies or probabilities outside [0,1] throw ProtocolError.
std::vector<ExternalScores> external_predict(const ExternalModelRef& endpoint, std::size_t k,
                                             std::span<const ContextualUtterance> batch);

}  // namespace micode
