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
#include <fstream>
#include <sstream>
#include <optional>
#include <string>
#include <unistd.h>

#include "micode/corpus.hpp"
#include "micode/random.hpp"

namespace testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("micode-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

// Compact corpus builder: roles alternate as given, one minute apart.
struct ConvSpec {
  std::string id, listener, member;
  std::int64_t start = 1'600'000'000;
  std::vector<std::pair<micode::SpeakerRole, std::string>> turns;
  std::optional<int> rating;
  std::optional<double> member_age = 30, listener_age = 30;
};

inline micode::Conversation make_conversation(const ConvSpec& s) {
  micode::Conversation c;
  c.conversation_id = s.id;
  c.listener_id = s.listener;
  c.member_id = s.member;
  c.rating = s.rating;
  c.member_age = s.member_age;
  c.listener_age = s.listener_age;
  for (std::size_t i = 0; i < s.turns.size(); ++i) {
    micode::Utterance u;
    u.utterance_id = s.id + "-u" + std::to_string(i);
    u.conversation_id = s.id;
    u.index = i;
    u.speaker = s.turns[i].first;
    u.timestamp = {s.start + static_cast<std::int64_t>(60 * i)};
    u.text = s.turns[i].second;
    c.utterances.push_back(std::move(u));
  }
  return c;
}

}  // namespace testing
