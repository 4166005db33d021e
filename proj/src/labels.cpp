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

#include "micode/labels.hpp"

#include <fstream>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "micode/error.hpp"
#include "micode/text.hpp"

namespace micode {

using nlohmann::json;

std::string LabelSource::to_string() const { return (is_human() ? "human:" : "model:") + id; }

LabelSource LabelSource::parse(std::string_view s) {
  LabelSource src;
  if (s.starts_with("human:"))
    src.kind = Kind::Human;
  else if (s.starts_with("model:"))
    src.kind = Kind::Model;
  else
    throw DataError("bad_source", fmt::format("label source '{}' must start with human: or model:", s));
  src.id = std::string(s.substr(6));
  if (src.id.empty()) throw DataError("bad_source", fmt::format("label source '{}' has an empty id", s));
  return src;
}

void validate_label_record(const LabelRecord& r) {
  if (r.utterance_id.empty()) throw DataError("bad_label", "label record without utterance_id");
  if (r.source.is_human()) {
    if (r.codes.empty()) throw DataError("no_codes", "human label needs at least one code");
    if (r.codes.size() > 3) throw DataError("too_many_codes", "max 3 codes");
  }
  for (auto c : kAllCodes) {
    const auto& conf = r.confidence[index_of(c)];
    if (!conf) continue;
    if (!(*conf >= 0.0 && *conf <= 1.0))
      throw DataError("bad_confidence", fmt::format("confidence {} for {} outside [0,1]", *conf, code_name(c)));
  }
}

std::string to_json_line(const LabelRecord& r) {
  json j;
  j["utterance_id"] = r.utterance_id;
  j["source"] = r.source.to_string();
  json codes = json::array();
  json conf = json::array();
  bool any_conf = false;
  for (auto c : r.codes.to_vector()) {
    codes.push_back(code_name(c));
    const auto& v = r.confidence[index_of(c)];
    conf.push_back(v ? json(*v) : json(nullptr));
    any_conf = any_conf || v.has_value();
  }
  j["codes"] = std::move(codes);
  if (any_conf) j["confidence"] = std::move(conf);
  j["decided_at"] = format_iso8601(r.decided_at);
  return j.dump();
}

LabelRecord parse_label_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError("bad_label", fmt::format("invalid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw DataError("bad_label", "label record is not a JSON object");
  LabelRecord r;
  try {
    r.utterance_id = j.at("utterance_id").get<std::string>();
    r.source = LabelSource::parse(j.at("source").get<std::string>());
    const auto& codes = j.at("codes");
    if (!codes.is_array()) throw DataError("bad_label", "codes must be an array");
    std::vector<MiCode> order;
    for (const auto& name : codes) {
      auto code = parse_code(name.get<std::string>());
      if (!code) throw DataError("unknown_code", fmt::format("unknown code '{}'", name.get<std::string>()));
      if (r.codes.contains(*code)) throw DataError("bad_label", fmt::format("duplicate code '{}'", code_name(*code)));
      r.codes.insert(*code);
      order.push_back(*code);
    }
    if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != order.size())
        throw DataError("bad_label", "confidence must align with codes");
      for (std::size_t i = 0; i < order.size(); ++i)
        if (!(*it)[i].is_null()) r.confidence[index_of(order[i])] = (*it)[i].get<double>();
    }
    r.decided_at = parse_iso8601(j.at("decided_at").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError("bad_label", fmt::format("malformed label record: {}", e.what()));
  }
  validate_label_record(r);
  return r;
}

std::vector<LabelRecord> read_label_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("unreadable_file", fmt::format("cannot read label file '{}'", path.string()));
  std::vector<LabelRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_label_line(line));
    } catch (const DataError& e) {
      throw DataError(e.code(), fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

void write_label_file(const std::filesystem::path& path, const std::vector<LabelRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("unwritable_file", fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

LabelMap resolve_labels(const std::vector<LabelRecord>& records) {
  // (utterance -> source -> latest record). Later log entries supersede.
  std::unordered_map<std::string, std::map<std::string, const LabelRecord*>> latest;
  for (const auto& r : records) latest[r.utterance_id][r.source.to_string()] = &r;

  LabelMap out;
  out.reserve(latest.size());
  for (const auto& [utt, by_source] : latest) {
    const LabelRecord* chosen = nullptr;
    int chosen_rank = 3;
    for (const auto& [src, rec] : by_source) {
      // std::map iterates sources in lexicographic order, so the first
      // match within a rank is the smallest id.
      const int rank = rec->source.is_consensus() ? 0 : rec->source.is_human() ? 1 : 2;
      if (rank < chosen_rank) {
        chosen = rec;
        chosen_rank = rank;
      }
    }
    out.emplace(utt, chosen->codes);
  }
  return out;
}

}  // namespace micode
