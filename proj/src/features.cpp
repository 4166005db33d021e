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

#include "micode/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "micode/random.hpp"
#include "micode/text.hpp"

namespace micode {

std::uint32_t feature_slot(std::string_view key) noexcept {
  const std::uint64_t h = fnv1a64(key) * 0x9E3779B97F4A7C15ULL;
  return static_cast<std::uint32_t>(h >> (64 - kFeatureBits));
}

FeatureVector featurize_counts(std::string_view context_text) {
  const std::string lowered = to_lower(context_text);
  const auto tokens = word_tokens(lowered);

  std::vector<std::uint32_t> slots;
  slots.reserve(tokens.size() * 12);
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    key.assign("w\x1f").append(tokens[i]);
    slots.push_back(feature_slot(key));
    if (i + 1 < tokens.size()) {
      key.assign("b\x1f").append(tokens[i]).append(" ").append(tokens[i + 1]);
      slots.push_back(feature_slot(key));
    }
    if (tokens[i] == kContextMarker) continue;
    const std::string padded = "<" + tokens[i] + ">";
    std::vector<std::size_t> starts;
    for (std::size_t b = 0; b < padded.size(); ++b)
      if ((static_cast<unsigned char>(padded[b]) & 0xC0) != 0x80) starts.push_back(b);
    starts.push_back(padded.size());
    const std::size_t nchars = starts.size() - 1;
    for (std::size_t n = 3; n <= 5; ++n) {
      for (std::size_t s = 0; s + n <= nchars; ++s) {
        key.assign("c\x1f").append(padded, starts[s], starts[s + n] - starts[s]);
        slots.push_back(feature_slot(key));
      }
    }
  }

  std::sort(slots.begin(), slots.end());
  FeatureVector fv;
  for (std::size_t i = 0; i < slots.size();) {
    std::size_t j = i;
    while (j < slots.size() && slots[j] == slots[i]) ++j;
    fv.indices.push_back(slots[i]);
    fv.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  return fv;
}

FeatureVector featurize(std::string_view context_text) {
  FeatureVector fv = featurize_counts(context_text);
  double sq = 0.0;
  for (double v : fv.values) sq += v * v;
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : fv.values) v *= inv;
  }
  return fv;
}

}  // namespace micode
