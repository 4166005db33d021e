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
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "micode/time.hpp"

namespace micode {

enum class SpeakerRole : std::uint8_t { Listener, Member };

struct Utterance {
  std::string utterance_id;
  std::string conversation_id;
  std::size_t index = 0;
  SpeakerRole speaker = SpeakerRole::Listener;
  Instant timestamp;
  std::string text;
};

struct Conversation {
  std::string conversation_id;
  std::string listener_id;
  std::string member_id;
  std::optional<double> listener_age;
  std::optional<double> member_age;
  std::optional<int> rating;  // 1..5
  std::vector<Utterance> utterances;

  // Timestamp of the first utterance, or the epoch for an empty conversation.
  Instant start_time() const noexcept { return utterances.empty() ? Instant{} : utterances.front().timestamp; }
};

// Location of an utterance inside a Corpus.
struct UtteranceRef {
  std::size_t conversation = 0;
  std::size_t position = 0;
};

// Immutable, id-ordered set of conversations with an utterance index.
class Corpus {
 public:
  Corpus() = default;
  // Sorts by conversation_id. Throws DataError on duplicate utterance or
  // conversation ids.
  explicit Corpus(std::vector<Conversation> conversations);

  const std::vector<Conversation>& conversations() const noexcept { return conversations_; }
  std::size_t size() const noexcept { return conversations_.size(); }
  bool empty() const noexcept { return conversations_.empty(); }
  std::size_t utterance_count() const noexcept { return utterance_count_; }

  const Conversation* find_conversation(std::string_view id) const;
  std::optional<UtteranceRef> locate(std::string_view utterance_id) const;
  const Utterance* find_utterance(std::string_view utterance_id) const;

 private:
  std::vector<Conversation> conversations_;
  std::unordered_map<std::string, UtteranceRef> by_utterance_;
  std::unordered_map<std::string, std::size_t> by_conversation_;
  std::size_t utterance_count_ = 0;
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based; 0 when not tied to a line
  std::string message;
};

struct ParseResult {
  Corpus corpus;
  std::vector<ParseIssue> issues;
  std::size_t skipped_records = 0;
};

// Newline-delimited JSON transcript. Malformed records are skipped and
// reported; with `strict` the first problem throws DataError instead.
ParseResult parse_corpus(const std::filesystem::path& path, bool strict = false);
ParseResult parse_corpus(std::istream& in, bool strict = false);
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

enum class SatisfactionClass : std::uint8_t { Satisfactory, Unsatisfactory };

// 4,5 -> Satisfactory; 1..3 -> Unsatisfactory. Throws DataError otherwise.
SatisfactionClass binarize_rating(int rating);

struct ContextualUtterance {
  Utterance target;
  std::size_t k = 0;
  std::string context_text;
};

// Joins up to k preceding utterances (any speaker) and the target, oldest
// first, with kContextSeparator. `position` indexes conversation.utterances.
ContextualUtterance build_context(const Conversation& conversation, std::size_t position, std::size_t k);

// Listeners whose own utterances span at least `min_span_days` and who took
// part in at least `min_sessions` distinct conversations.
std::set<std::string> filter_active_listeners(const Corpus& corpus, double min_span_days = 365.0,
                                              std::size_t min_sessions = 500);

Corpus filter_min_length(const Corpus& corpus, std::size_t min_utterances = 50);
Corpus restrict_to_listeners(const Corpus& corpus, const std::set<std::string>& listeners);

enum class TenureBucket : std::uint8_t { M0to1, M1to6, M6to12, Y1plus };
inline constexpr std::size_t kNumBuckets = 4;
inline constexpr std::array<TenureBucket, kNumBuckets> kAllBuckets = {TenureBucket::M0to1, TenureBucket::M1to6,
                                                                     TenureBucket::M6to12, TenureBucket::Y1plus};
std::string_view bucket_name(TenureBucket b) noexcept;

// Day-based boundaries at 30, 180 and 365 days, lower-inclusive. Throws
// DataError when utterance_time precedes the join time.
TenureBucket tenure_bucket(Instant listener_first_utterance, Instant utterance_time);

// Each listener's first own utterance, the "joining" time for tenure.
std::map<std::string, Instant> listener_join_times(const Corpus& corpus);

}  // namespace micode
