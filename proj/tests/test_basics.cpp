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

#include <cstdlib>
#include <set>

#include "micode/codes.hpp"
#include "micode/error.hpp"
#include "micode/random.hpp"
#include "micode/text.hpp"
#include "micode/time.hpp"

using namespace micode;

TEST_CASE("code schema has 17 codes and round-trips names") {
  CHECK(kAllCodes.size() == 17);
  std::set<std::string_view> names;
  for (auto c : kAllCodes) {
    names.insert(code_name(c));
    REQUIRE(parse_code(code_name(c)).has_value());
    CHECK(*parse_code(code_name(c)) == c);
  }
  CHECK(names.size() == 17);
  CHECK_FALSE(parse_code("Confront").has_value());
  CHECK(display_name(MiCode::ChitChat) == "Chit-Chat");
}

TEST_CASE("category grouping") {
  int consistent = 0, inconsistent = 0;
  for (auto c : kAllCodes) {
    consistent += category_of(c) == MiCategory::MiConsistent;
    inconsistent += category_of(c) == MiCategory::MiInconsistent;
  }
  CHECK(consistent == 7);
  CHECK(inconsistent == 2);
  CHECK(category_of(MiCode::Inappropriate) == MiCategory::MiInconsistent);
  CHECK(category_of(MiCode::Direct) == MiCategory::MiInconsistent);
  CHECK(category_of(MiCode::Reflection) == MiCategory::MiConsistent);
  CHECK(category_of(MiCode::Introduction) == MiCategory::Other);
}

TEST_CASE("CodeSet basics") {
  CodeSet s{MiCode::Reflection, MiCode::Affirm};
  CHECK(s.size() == 2);
  CHECK(s.contains(MiCode::Affirm));
  s.erase(MiCode::Affirm);
  CHECK_FALSE(s.contains(MiCode::Affirm));
  CHECK(CodeSet{MiCode::Reflection}.is_subset_of(CodeSet{MiCode::Reflection, MiCode::Other}));
  CHECK(to_string(CodeSet{MiCode::Support, MiCode::GivingInformation}) == "GivingInformation,Support");
}

TEST_CASE("timestamps parse and format in UTC") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z").seconds == 0);
  CHECK(parse_iso8601("2020-01-01T00:00:00Z").seconds == 1577836800);
  CHECK(parse_iso8601("2020-02-29T12:30:15.250+00:00").seconds == 1582979415);
  CHECK(format_iso8601(Instant{1582979415}) == "2020-02-29T12:30:15Z");
  CHECK_THROWS_AS(parse_iso8601("2020-01-01T00:00:00+02:00"), DataError);
  CHECK_THROWS_AS(parse_iso8601("yesterday"), DataError);
  for (std::int64_t t : {0LL, 86399LL, 951782400LL, 4102444800LL})
    CHECK(parse_iso8601(format_iso8601(Instant{t})).seconds == t);
}

TEST_CASE("now_utc honours SOURCE_DATE_EPOCH") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(now_utc().seconds == 1700000000);
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(now_utc().seconds > 1700000000);
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(derive_seed(42, "x", 3)), b(derive_seed(42, "x", 3)), c(derive_seed(42, "x", 4));
  const auto va = a.next(), vb = b.next(), vc = c.next();
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  Rng r(5);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto v = r.between(3, 7);
    CHECK((v >= 3 && v <= 7));
    sum += r.normal();
  }
  CHECK(std::abs(sum / 20000) < 0.05);
}

TEST_CASE("text normalisation") {
  CHECK(trim("  hi \n") == "hi");
  CHECK(nfc("e\xCC\x81") == "\xC3\xA9");
  CHECK(normalize_transcript_text("  a ⟂ b ") == "a ⊥ b");
  CHECK(to_lower("HeLLo") == "hello");
  CHECK(to_lower("ÉCOLE") == "école");
  const auto toks = word_tokens("don't stop ⟂ me, now!");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0] == "don't");
  CHECK(toks[2] == "⟂");
  CHECK(toks[4] == "now");
}
