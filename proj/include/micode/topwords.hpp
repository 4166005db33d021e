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
#include <string>
#include <string_view>
#include <vector>

#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/labels.hpp"

namespace micode {

// Porter (1980) suffix stripping on a lowercase ASCII word. Words with
// other characters are returned unchanged.
std::string porter_stem(std::string_view word);

bool is_stopword(std::string_view lowercase_word);
const std::vector<std::string_view>& stopwords();

struct TopWord {
  std::string word;  // most frequent surface form of the stem
  std::string stem;
  double score = 0.0;
};

struct TopWordsReport {
  std::array<std::vector<TopWord>, kNumCodes> per_code{};
  std::array<std::size_t, kNumCodes> document_tokens{};
  std::size_t n = 5;
};

// One document per code: every listener utterance labeled with it. Scores
// are tf * ln(1 + 17 / (1 + df)); ties go to the lexicographically smaller
// stem. Codes with empty documents get empty lists.
TopWordsReport top_words(const Corpus& corpus, const LabelMap& labels, std::size_t n = 5);

// Single code; throws DataError("empty_document") when no utterance
// carries it.
std::vector<TopWord> tfidf_top_words(const Corpus& corpus, const LabelMap& labels, MiCode code, std::size_t n = 5);

std::string topwords_table(const TopWordsReport& report);
std::string topwords_tsv(const TopWordsReport& report);

}  // namespace micode
