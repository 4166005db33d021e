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
#include <string>
#include <string_view>
#include <vector>

#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/labels.hpp"
#include "micode/time.hpp"

namespace micode {

enum class TenureSampling : std::uint8_t {
  Uniform,         // conversation offsets uniform over [0, max_tenure_days]
  BucketBalanced,  // pick a tenure bucket uniformly, then a day inside it
};

struct GeneratorSpec {
  std::uint64_t seed = 7;
  std::size_t n_conversations = 734;
  std::size_t n_listeners = 40;
  std::size_t n_members = 500;
  std::size_t min_listener_utterances = 15;
  std::size_t max_listener_utterances = 25;
  double member_turn_probability = 0.6;  // member message before a listener message
  std::size_t min_filler = 3;
  std::size_t max_filler = 8;
  std::size_t keywords_per_code = 2;

  std::array<double, kNumCodes> code_probability{};
  std::array<std::vector<std::string>, kNumCodes> lexicon{};
  std::array<double, kNumCodes> keyword_probability{};
  // Codes whose keyword goes at the end of the preceding member message
  // instead of the listener message itself.
  CodeSet context_codes;
  // Probability that a listener message is exactly {Introduction, OpenQuestion}.
  double intro_open_probability = 0.0;

  // Planted satisfaction logit over true listener code counts and ages.
  double intercept = 0.0;
  std::array<double, kNumCodes> beta{};  // Other is ignored
  double beta_member_age = 0.0;
  double beta_listener_age = 0.0;
  double rating_probability = 1.0;
  double missing_age_probability = 0.0;
  double member_age_min = 18.0, member_age_max = 60.0;
  double listener_age_min = 18.0, listener_age_max = 60.0;

  // Code probability at tenure t days: base + slope * min(t, horizon) / 365.
  std::array<double, kNumCodes> drift_per_year{};
  double drift_horizon_days = 730.0;
  double max_tenure_days = 730.0;
  TenureSampling tenure_sampling = TenureSampling::Uniform;

  // Per-listener latent style z ~ N(0,1) scales these codes by max(0, 1 + strength * z).
  CodeSet style_codes;
  double style_strength = 0.0;

  Instant epoch = {1577836800};  // 2020-01-01T00:00:00Z
  bool emit_text = true;
};

// Presets: "default", "separable", "context", "recovery", "observed", "drift",
// "nodrift". Throws UsageError for an unknown name.
GeneratorSpec preset(std::string_view name, std::uint64_t seed = 7);
std::vector<std::string> preset_names();

// Code shares of a large annotated peer-support corpus, normalized by its utterance count.
std::array<double, kNumCodes> default_code_probabilities();
std::array<std::vector<std::string>, kNumCodes> default_lexicons();
// 1,000 fixed pseudo-words used as filler text.
const std::vector<std::string>& filler_words();

// Throws DataError("infeasible_spec") on invalid probabilities, empty
// lexicons for active codes, overlapping lexicons, or probabilities that do
// not fit the three sampling slots.
void validate_spec(const GeneratorSpec& spec);

// Codes are drawn from three slots, at most one code per slot; each slot's
// probabilities sum to at most 1.
std::array<int, kNumCodes> slot_assignment(const GeneratorSpec& spec);

// Marginal probability that a listener message carries `code` at zero
// tenure with neutral style, including the Other fallback and the
// Introduction/OpenQuestion pair event.
double expected_code_probability(const GeneratorSpec& spec, MiCode code);

struct GeneratedCorpus {
  Corpus corpus;
  std::vector<LabelRecord> labels;       // one human:simgen record per listener message
  std::vector<bool> latent_satisfied;    // aligned with corpus.conversations()
  std::vector<double> listener_style;    // per listener index
  GeneratorSpec spec;
};

inline constexpr std::string_view kSimgenAnnotator = "simgen";

GeneratedCorpus generate_corpus(const GeneratorSpec& spec);

// JSON record of every planted parameter.
std::string planted_json(const GeneratorSpec& spec);
// corpus.jsonl, labels.jsonl, planted.json under `dir`.
void write_generated(const GeneratedCorpus& g, const std::filesystem::path& dir);

}  // namespace micode
