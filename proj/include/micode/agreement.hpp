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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "micode/codes.hpp"
#include "micode/label_store.hpp"
#include "micode/labels.hpp"

namespace micode {

// Units x observers table of nominal values; std::nullopt marks a missing
// rating.
struct ReliabilityMatrix {
  std::vector<std::string> units;
  std::vector<std::string> observers;
  std::vector<std::optional<int>> values;  // row-major, units.size() * observers.size()

  ReliabilityMatrix() = default;
  ReliabilityMatrix(std::vector<std::string> u, std::vector<std::string> o)
      : units(std::move(u)), observers(std::move(o)), values(units.size() * observers.size()) {}

  std::optional<int>& at(std::size_t unit, std::size_t observer) { return values[unit * observers.size() + observer]; }
  const std::optional<int>& at(std::size_t unit, std::size_t observer) const {
    return values[unit * observers.size() + observer];
  }
};

struct AlphaResult {
  std::optional<double> alpha;  // undefined: no pairable values, or zero expected disagreement
  std::size_t units_used = 0;   // units with >= 2 ratings
  std::size_t pairable_values = 0;
};

// Nominal Krippendorff alpha from the coincidence matrix: each unit with m
// ratings adds its ordered value pairs with weight 1/(m-1);
// alpha = 1 - (n-1) * sum_{c!=k} o_ck / sum_{c!=k} n_c n_k.
AlphaResult krippendorff_alpha(const ReliabilityMatrix& matrix);

// Presence/absence of `code` per utterance per human annotator (consensus
// excluded). Units are utterances with a human record. `extra` adds one more
// observer column with the given code sets (e.g. a model).
ReliabilityMatrix reliability_for_code(const LabelView& view, MiCode code, std::span<const std::string> units = {},
                                       const LabelMap* extra = nullptr, const std::string& extra_name = "model");

struct CodeAgreement {
  MiCode code = MiCode::Other;
  AlphaResult alpha;
  std::size_t positive_count = 0;  // utterances carrying the code after resolution
};

struct AgreementReport {
  std::array<CodeAgreement, kNumCodes> per_code{};
  // Pooled (utterance, code) pairs as units.
  AlphaResult cumulative;
  double acceptance_threshold = 0.7;

  bool accepted(MiCode c) const {
    const auto& a = per_code[index_of(c)].alpha.alpha;
    return a && *a >= acceptance_threshold;
  }
};

AgreementReport agreement_report(const LabelView& view, double acceptance_threshold = 0.7);

struct ValidationRow {
  MiCode code = MiCode::Other;
  AlphaResult inter_human;
  AlphaResult human_model;
};

struct ValidationReport {
  std::vector<std::string> sampled;
  std::array<ValidationRow, kNumCodes> per_code{};
  AlphaResult cumulative_inter_human;
  AlphaResult cumulative_human_model;
};

// Seeded uniform sample of n utterances that carry both a human record and a
// model label; alphas between the humans, and with the model added as one
// more observer. Throws DataError("insufficient_labels") when fewer than n
// candidates exist.
ValidationReport validation_sample(const LabelView& view, const LabelMap& model_labels, std::size_t n,
                                   std::uint64_t seed);

std::string format_alpha(const AlphaResult& a);  // "0.533" or "NAN"
std::string agreement_table(const AgreementReport& report);
std::string agreement_tsv(const AgreementReport& report);
std::string validation_table(const ValidationReport& report);
std::string validation_tsv(const ValidationReport& report);

}  // namespace micode
