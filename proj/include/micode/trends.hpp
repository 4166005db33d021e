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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/labels.hpp"

namespace micode {

struct BucketCell {
  std::size_t utterance_count = 0;
  std::size_t code_count = 0;
  std::optional<double> fraction;  // empty when the bucket has no utterances
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct TrendSeries {
  std::array<std::array<BucketCell, kNumBuckets>, kNumCodes> cells{};  // [code][bucket]
  std::size_t listeners = 0;
  std::size_t unlabeled_skipped = 0;

  const BucketCell& at(MiCode c, TenureBucket b) const {
    return cells[index_of(c)][static_cast<std::size_t>(b)];
  }
};

// Conversations of active listeners that are at least `min_utterances` long.
Corpus active_listener_cohort(const Corpus& corpus, double min_span_days = 365.0, std::size_t min_sessions = 500,
                              std::size_t min_utterances = 50);

// Wilson score interval. Throws UsageError when total == 0 or successes > total.
std::pair<double, double> proportion_ci(std::size_t successes, std::size_t total, double level = 0.95);

// Fraction of listener utterances per tenure bucket carrying each code.
// Tenure is measured from each listener's first utterance in `corpus`
// unless `join_times` overrides it. Listener utterances missing from
// `labels` throw DataError("missing_labels").
TrendSeries code_fraction_by_bucket(const Corpus& corpus, const LabelMap& labels,
                                    const std::map<std::string, Instant>* join_times = nullptr);

enum class CorrLevel : std::uint8_t { Utterance, Conversation, Listener };
std::string_view level_name(CorrLevel level) noexcept;

struct CorrMatrix {
  CorrLevel level = CorrLevel::Utterance;
  std::vector<std::string> variables;
  std::vector<std::optional<double>> r;  // row-major, empty cell = undefined
  std::size_t n = 0;                     // observations behind every cell

  std::size_t size() const noexcept { return variables.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const { return r[i * variables.size() + j]; }
  std::vector<std::string> undefined_variables() const;
};

// 17 binary indicator columns, one row per labeled utterance.
CorrMatrix cooccurrence_matrix(std::span<const CodeSet> labels);
// Listener utterances of `corpus` that have labels.
CorrMatrix cooccurrence_matrix(const Corpus& corpus, const LabelMap& labels);
// Per-conversation code counts plus conversation length.
CorrMatrix conversation_corr(const Corpus& corpus, const LabelMap& labels);
// Per-listener code rates; needs at least two listeners with utterances.
CorrMatrix listener_corr(const Corpus& corpus, const LabelMap& labels);

std::string trend_tsv(const TrendSeries& series);
std::string trend_table(const TrendSeries& series);
// Static line plot of fractions with interval whiskers, one panel per code.
std::string trend_svg(const TrendSeries& series, std::span<const MiCode> codes = kAllCodes);

std::string corr_tsv(const CorrMatrix& m);

}  // namespace micode
