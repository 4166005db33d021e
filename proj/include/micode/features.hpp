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

#include <cstdint>
#include <string_view>
#include <vector>

namespace micode {

inline constexpr unsigned kFeatureBits = 20;
inline constexpr std::uint32_t kFeatureDim = 1u << kFeatureBits;

// Sparse, L2-normalized hashed n-gram counts. Indices are sorted and unique.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Hash slot of an already-prefixed n-gram key ("w\x1f<tok>", "b\x1f<a> <b>",
// "c\x1f<chars>").
std::uint32_t feature_slot(std::string_view key) noexcept;

// Lowercased word unigrams and bigrams plus per-word character 3..5-grams
// (words padded with '<' and '>'), hashed, counted and L2-normalized.
FeatureVector featurize(std::string_view context_text);

// Same as featurize but without the final normalization; values are raw
// counts. Exposed for tests.
FeatureVector featurize_counts(std::string_view context_text);

}  // namespace micode
