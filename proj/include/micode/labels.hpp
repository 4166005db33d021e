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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "micode/codes.hpp"
#include "micode/time.hpp"

namespace micode {

struct LabelSource {
  enum class Kind : std::uint8_t { Human, Model };
  Kind kind = Kind::Human;
  std::string id;

  bool is_human() const noexcept { return kind == Kind::Human; }
  bool is_consensus() const noexcept { return is_human() && id == kConsensusAnnotator; }
  std::string to_string() const;
  // "human:<id>" or "model:<id>"; throws DataError otherwise.
  static LabelSource parse(std::string_view s);

  static constexpr std::string_view kConsensusAnnotator = "consensus";

  friend bool operator==(const LabelSource&, const LabelSource&) = default;
};

using Confidences = std::array<std::optional<double>, kNumCodes>;

struct LabelRecord {
  std::string utterance_id;
  LabelSource source;
  CodeSet codes;
  Confidences confidence{};  // set for listed codes on model records
  Instant decided_at;
};

// Human records need 1..3 codes; model records may carry any number.
// Confidences must lie in [0,1]. Throws DataError.
void validate_label_record(const LabelRecord& r);

std::string to_json_line(const LabelRecord& r);
LabelRecord parse_label_line(std::string_view line);

std::vector<LabelRecord> read_label_file(const std::filesystem::path& path);
void write_label_file(const std::filesystem::path& path, const std::vector<LabelRecord>& records);

// Resolved code set per utterance id.
using LabelMap = std::unordered_map<std::string, CodeSet>;

// Latest record per (utterance, source), then per utterance: consensus,
// else the lexicographically smallest human annotator, else the smallest
// model id.
LabelMap resolve_labels(const std::vector<LabelRecord>& records);

}  // namespace micode
