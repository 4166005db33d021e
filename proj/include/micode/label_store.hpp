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

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "micode/labels.hpp"

namespace micode {

// Immutable current view of a label log.
struct LabelView {
  // (utterance_id, source string) -> latest record from that source.
  std::map<std::pair<std::string, std::string>, LabelRecord> current;
  // Utterances with at least one human record.
  std::set<std::string> verified;

  std::vector<LabelRecord> current_records() const;
  // Latest human records only, consensus included.
  std::vector<LabelRecord> human_records() const;
  const LabelRecord* find(const std::string& utterance_id, const LabelSource& source) const;

  friend bool operator==(const LabelView& a, const LabelView& b);
};

struct ReplayReport {
  std::size_t records = 0;
  std::size_t truncated_bytes = 0;  // torn tail discarded on open
};

struct AppendOutcome {
  bool appended = false;  // false when the record repeats the current view
  LabelRecord record;
};

// Append-only label log. Every record is validated (1..3 codes), written as
// one JSON line and fsync'ed before append() returns; the current view is
// then swapped in so readers only ever see whole records. A store opened on
// a file takes an exclusive lock on "<file>.lock".
class LabelStore {
 public:
  LabelStore();  // in-memory
  ~LabelStore();
  LabelStore(LabelStore&&) noexcept;
  LabelStore& operator=(LabelStore&&) noexcept;

  // Creates the file when missing, replays it and truncates a torn final
  // line. Throws DataError("store_locked") if another store holds the lock,
  // DataError("corrupt_log") on an unparsable complete line.
  static LabelStore open(const std::filesystem::path& path);

  // Rebuilds a view from a log in order (later records supersede).
  static LabelView replay(const std::vector<LabelRecord>& log);

  AppendOutcome append(LabelRecord record);
  std::shared_ptr<const LabelView> snapshot() const;
  std::vector<LabelRecord> log() const;
  std::size_t log_size() const;
  const ReplayReport& replay_report() const noexcept;

  // Rewrites the file with only the current records (temp file + rename).
  void compact();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace micode
