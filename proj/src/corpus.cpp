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

#include "micode/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "micode/error.hpp"
#include "micode/text.hpp"

namespace micode {

using nlohmann::json;

Corpus::Corpus(std::vector<Conversation> conversations) : conversations_(std::move(conversations)) {
  std::stable_sort(conversations_.begin(), conversations_.end(),
                   [](const Conversation& a, const Conversation& b) { return a.conversation_id < b.conversation_id; });
  for (std::size_t c = 0; c < conversations_.size(); ++c) {
    const auto& conv = conversations_[c];
    if (!by_conversation_.emplace(conv.conversation_id, c).second)
      throw DataError("duplicate_conversation", fmt::format("duplicate conversation_id '{}'", conv.conversation_id));
    for (std::size_t p = 0; p < conv.utterances.size(); ++p) {
      if (!by_utterance_.emplace(conv.utterances[p].utterance_id, UtteranceRef{c, p}).second)
        throw DataError("duplicate_utterance",
                        fmt::format("duplicate utterance_id '{}'", conv.utterances[p].utterance_id));
    }
    utterance_count_ += conv.utterances.size();
  }
}

const Conversation* Corpus::find_conversation(std::string_view id) const {
  auto it = by_conversation_.find(std::string(id));
  return it == by_conversation_.end() ? nullptr : &conversations_[it->second];
}

std::optional<UtteranceRef> Corpus::locate(std::string_view utterance_id) const {
  auto it = by_utterance_.find(std::string(utterance_id));
  if (it == by_utterance_.end()) return std::nullopt;
  return it->second;
}

const Utterance* Corpus::find_utterance(std::string_view utterance_id) const {
  auto ref = locate(utterance_id);
  return ref ? &conversations_[ref->conversation].utterances[ref->position] : nullptr;
}

namespace {

struct PendingUtterance {
  Utterance utterance;
  std::size_t line;
};

class IssueSink {
 public:
  explicit IssueSink(bool strict) : strict_(strict) {}
  void report(std::size_t line, std::string message) {
    if (strict_) throw DataError("malformed_record", fmt::format("line {}: {}", line, message));
    issues.push_back({line, std::move(message)});
    ++skipped;
  }
  std::vector<ParseIssue> issues;
  std::size_t skipped = 0;

 private:
  bool strict_;
};

std::optional<double> optional_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(fmt::format("field '{}' must be a number", key));
  return it->get<double>();
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw DataError(fmt::format("missing string field '{}'", key));
  auto s = it->get<std::string>();
  if (s.empty()) throw DataError(fmt::format("field '{}' is empty", key));
  return s;
}

Conversation parse_header(const json& j) {
  Conversation c;
  c.conversation_id = required_string(j, "conversation_id");
  c.listener_id = required_string(j, "listener_id");
  c.member_id = required_string(j, "member_id");
  c.listener_age = optional_number(j, "listener_age");
  c.member_age = optional_number(j, "member_age");
  if (auto r = optional_number(j, "rating")) {
    if (*r != static_cast<int>(*r) || *r < 1 || *r > 5)
      throw DataError(fmt::format("rating {} out of range 1..5", *r));
    c.rating = static_cast<int>(*r);
  }
  return c;
}

Utterance parse_utterance(const json& j) {
  Utterance u;
  u.utterance_id = required_string(j, "utterance_id");
  u.conversation_id = required_string(j, "conversation_id");
  auto idx = j.find("index");
  if (idx == j.end() || !idx->is_number_integer() || idx->get<long long>() < 0)
    throw DataError("field 'index' must be a non-negative integer");
  u.index = idx->get<std::size_t>();
  const auto speaker = required_string(j, "speaker");
  if (speaker == "listener")
    u.speaker = SpeakerRole::Listener;
  else if (speaker == "member")
    u.speaker = SpeakerRole::Member;
  else
    throw DataError(fmt::format("unknown speaker '{}'", speaker));
  u.timestamp = parse_iso8601(required_string(j, "timestamp"));
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) throw DataError("missing string field 'text'");
  u.text = normalize_transcript_text(text->get<std::string>());
  if (u.text.empty()) throw DataError("utterance text is empty after trimming");
  return u;
}

}  // namespace

ParseResult parse_corpus(std::istream& in, bool strict) {
  IssueSink sink(strict);
  std::map<std::string, Conversation> headers;
  std::map<std::string, std::size_t> header_lines;
  std::vector<PendingUtterance> pending;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw DataError("record is not a JSON object");
      if (j.contains("utterance_id")) {
        pending.push_back({parse_utterance(j), lineno});
      } else {
        auto conv = parse_header(j);
        auto id = conv.conversation_id;
        if (headers.count(id)) throw DataError(fmt::format("duplicate conversation header '{}'", id));
        header_lines[id] = lineno;
        headers.emplace(std::move(id), std::move(conv));
      }
    } catch (const json::exception& e) {
      sink.report(lineno, fmt::format("invalid JSON: {}", e.what()));
    } catch (const DataError& e) {
      sink.report(lineno, e.what());
    }
  }

  std::stable_sort(pending.begin(), pending.end(), [](const PendingUtterance& a, const PendingUtterance& b) {
    if (a.utterance.conversation_id != b.utterance.conversation_id)
      return a.utterance.conversation_id < b.utterance.conversation_id;
    return a.utterance.index < b.utterance.index;
  });

  std::set<std::string> seen_ids;
  for (auto& p : pending) {
    auto& u = p.utterance;
    auto it = headers.find(u.conversation_id);
    if (it == headers.end()) {
      sink.report(p.line, fmt::format("utterance '{}' references unknown conversation '{}'", u.utterance_id,
                                      u.conversation_id));
      continue;
    }
    if (!seen_ids.insert(u.utterance_id).second) {
      sink.report(p.line, fmt::format("duplicate utterance_id '{}'", u.utterance_id));
      continue;
    }
    auto& utts = it->second.utterances;
    if (!utts.empty() && utts.back().index == u.index) {
      sink.report(p.line, fmt::format("duplicate index {} in conversation '{}'", u.index, u.conversation_id));
      continue;
    }
    if (!utts.empty() && utts.back().timestamp > u.timestamp) {
      sink.report(p.line, fmt::format("timestamp of '{}' precedes the previous utterance", u.utterance_id));
      continue;
    }
    utts.push_back(std::move(u));
  }

  std::vector<Conversation> conversations;
  conversations.reserve(headers.size());
  for (auto& [id, conv] : headers) conversations.push_back(std::move(conv));

  ParseResult result;
  result.corpus = Corpus(std::move(conversations));
  result.issues = std::move(sink.issues);
  result.skipped_records = sink.skipped;
  return result;
}

ParseResult parse_corpus(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw DataError("unreadable_file", fmt::format("cannot read corpus file '{}'", path.string()));
  return parse_corpus(in, strict);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& c : corpus.conversations()) {
    json h = {{"conversation_id", c.conversation_id}, {"listener_id", c.listener_id}, {"member_id", c.member_id}};
    if (c.listener_age) h["listener_age"] = *c.listener_age;
    if (c.member_age) h["member_age"] = *c.member_age;
    if (c.rating) h["rating"] = *c.rating;
    out << h.dump() << '\n';
    for (const auto& u : c.utterances) {
      json r = {{"utterance_id", u.utterance_id},
                {"conversation_id", u.conversation_id},
                {"index", u.index},
                {"speaker", u.speaker == SpeakerRole::Listener ? "listener" : "member"},
                {"timestamp", format_iso8601(u.timestamp)},
                {"text", u.text}};
      out << r.dump() << '\n';
    }
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("unwritable_file", fmt::format("cannot write '{}'", path.string()));
  write_corpus(out, corpus);
}

SatisfactionClass binarize_rating(int rating) {
  if (rating < 1 || rating > 5) throw DataError("bad_rating", fmt::format("rating {} out of range 1..5", rating));
  return rating >= 4 ? SatisfactionClass::Satisfactory : SatisfactionClass::Unsatisfactory;
}

ContextualUtterance build_context(const Conversation& conversation, std::size_t position, std::size_t k) {
  if (position >= conversation.utterances.size())
    throw UsageError("bad_index", fmt::format("utterance position {} out of range for conversation '{}'", position,
                                              conversation.conversation_id));
  ContextualUtterance cu;
  cu.target = conversation.utterances[position];
  cu.k = k;
  const std::size_t first = position - std::min(k, position);
  for (std::size_t i = first; i < position; ++i) {
    cu.context_text += conversation.utterances[i].text;
    cu.context_text += kContextSeparator;
  }
  cu.context_text += cu.target.text;
  return cu;
}

std::set<std::string> filter_active_listeners(const Corpus& corpus, double min_span_days, std::size_t min_sessions) {
  struct Activity {
    std::optional<Instant> first, last;
    std::size_t sessions = 0;
  };
  std::map<std::string, Activity> activity;
  for (const auto& c : corpus.conversations()) {
    auto& a = activity[c.listener_id];
    ++a.sessions;
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      if (!a.first || u.timestamp < *a.first) a.first = u.timestamp;
      if (!a.last || u.timestamp > *a.last) a.last = u.timestamp;
    }
  }
  std::set<std::string> kept;
  for (const auto& [id, a] : activity) {
    const double span_days =
        a.first ? static_cast<double>(a.last->seconds - a.first->seconds) / static_cast<double>(kSecondsPerDay) : 0.0;
    if (span_days >= min_span_days && a.sessions >= min_sessions) kept.insert(id);
  }
  return kept;
}

Corpus filter_min_length(const Corpus& corpus, std::size_t min_utterances) {
  std::vector<Conversation> kept;
  for (const auto& c : corpus.conversations())
    if (c.utterances.size() >= min_utterances) kept.push_back(c);
  return Corpus(std::move(kept));
}

Corpus restrict_to_listeners(const Corpus& corpus, const std::set<std::string>& listeners) {
  std::vector<Conversation> kept;
  for (const auto& c : corpus.conversations())
    if (listeners.count(c.listener_id)) kept.push_back(c);
  return Corpus(std::move(kept));
}

std::string_view bucket_name(TenureBucket b) noexcept {
  switch (b) {
    case TenureBucket::M0to1: return "M0to1";
    case TenureBucket::M1to6: return "M1to6";
    case TenureBucket::M6to12: return "M6to12";
    case TenureBucket::Y1plus: return "Y1plus";
  }
  return "";
}

TenureBucket tenure_bucket(Instant listener_first_utterance, Instant utterance_time) {
  const std::int64_t elapsed = utterance_time.seconds - listener_first_utterance.seconds;
  if (elapsed < 0) throw DataError("negative_tenure", "utterance precedes the listener's first utterance");
  const double days = static_cast<double>(elapsed) / static_cast<double>(kSecondsPerDay);
  if (days < 30.0) return TenureBucket::M0to1;
  if (days < 180.0) return TenureBucket::M1to6;
  if (days < 365.0) return TenureBucket::M6to12;
  return TenureBucket::Y1plus;
}

std::map<std::string, Instant> listener_join_times(const Corpus& corpus) {
  std::map<std::string, Instant> joins;
  for (const auto& c : corpus.conversations())
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      auto [it, inserted] = joins.emplace(c.listener_id, u.timestamp);
      if (!inserted && u.timestamp < it->second) it->second = u.timestamp;
    }
  return joins;
}

}  // namespace micode
