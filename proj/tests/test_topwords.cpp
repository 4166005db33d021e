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

#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "micode/error.hpp"
#include "micode/simgen.hpp"
#include "micode/topwords.hpp"

using namespace micode;
using testing::make_conversation;

TEST_CASE("Porter stemmer reference pairs") {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"caresses", "caress"}, {"ponies", "poni"},         {"ties", "ti"},           {"cats", "cat"},
      {"feed", "feed"},       {"agreed", "agre"},         {"plastered", "plaster"}, {"motoring", "motor"},
      {"sing", "sing"},       {"conflated", "conflat"},   {"hopping", "hop"},       {"falling", "fall"},
      {"filing", "file"},     {"happy", "happi"},         {"sky", "sky"},           {"relational", "relat"},
      {"conditional", "condit"}, {"generalization", "gener"}, {"hopefulness", "hope"}, {"electrical", "electr"},
      {"adjustable", "adjust"}, {"controll", "control"},  {"roll", "roll"},         {"generate", "gener"},
      {"running", "run"},     {"feelings", "feel"},       {"a", "a"},               {"is", "is"},
  };
  for (const auto& [w, s] : pairs) {
    INFO(w);
    CHECK(porter_stem(w) == s);
  }
}

TEST_CASE("stopwords") {
  CHECK(is_stopword("the"));
  CHECK(is_stopword("you"));
  CHECK_FALSE(is_stopword("welcome"));
  CHECK(stopwords().size() > 100);
}

TEST_CASE("per-code documents rank distinctive stems first") {
  using R = SpeakerRole;
  Corpus corpus({make_conversation({"a", "L", "M", 0,
                                    {{R::Listener, "Welcome! Hello and welcome to the chat"},
                                     {R::Member, "hello hello hello"},
                                     {R::Listener, "It sounds like you are feeling lonely"},
                                     {R::Listener, "You feel lonely and tired, feelings matter"},
                                     {R::Listener, "hello again"}}})});
  LabelMap labels = {{"a-u0", {MiCode::Introduction}},
                     {"a-u2", {MiCode::Reflection}},
                     {"a-u3", {MiCode::Reflection}},
                     {"a-u4", {MiCode::Introduction, MiCode::Reflection}}};
  auto intro = tfidf_top_words(corpus, labels, MiCode::Introduction, 3);
  REQUIRE(intro.size() == 3);
  CHECK(intro[0].word == "welcome");
  CHECK(intro[1].word == "hello");
  CHECK(intro[0].score > intro[1].score);
  auto refl = tfidf_top_words(corpus, labels, MiCode::Reflection, 10);
  std::set<std::string> stems;
  for (const auto& w : refl) {
    CHECK_FALSE(is_stopword(w.word));
    stems.insert(w.stem);
  }
  CHECK(stems.count("feel"));
  CHECK(stems.count("lone"));
  CHECK(stems.size() == refl.size());
  CHECK(refl.size() <= 10);
  CHECK_THROWS_AS(tfidf_top_words(corpus, labels, MiCode::Direct, 3), DataError);
  auto report = top_words(corpus, labels, 2);
  CHECK(report.per_code[index_of(MiCode::Direct)].empty());
  CHECK(topwords_table(report).find("welcome, hello") != std::string::npos);
  CHECK(topwords_tsv(report) == topwords_tsv(top_words(corpus, labels, 2)));
}

TEST_CASE("planted Introduction lexicon surfaces as top words") {
  auto g = generate_corpus(preset("default", 7));
  auto words = tfidf_top_words(g.corpus, resolve_labels(g.labels), MiCode::Introduction, 5);
  std::set<std::string> got;
  for (const auto& w : words) got.insert(w.word);
  CHECK(got == std::set<std::string>{"hello", "good", "morning", "today", "welcome"});
}
