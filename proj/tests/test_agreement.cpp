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

#include "micode/agreement.hpp"
#include "micode/error.hpp"
#include "micode/random.hpp"
#include "oracles.hpp"

using namespace micode;

namespace {

ReliabilityMatrix matrix(const std::vector<std::vector<std::optional<int>>>& rows) {
  std::vector<std::string> units, obs;
  for (std::size_t u = 0; u < rows.size(); ++u) units.push_back("u" + std::to_string(u));
  for (std::size_t o = 0; o < rows.at(0).size(); ++o) obs.push_back("o" + std::to_string(o));
  ReliabilityMatrix m(units, obs);
  for (std::size_t u = 0; u < rows.size(); ++u)
    for (std::size_t o = 0; o < rows[u].size(); ++o) m.at(u, o) = rows[u][o];
  return m;
}

LabelRecord human(const std::string& utt, const std::string& who, CodeSet codes) {
  LabelRecord r;
  r.utterance_id = utt;
  r.source = LabelSource::parse("human:" + who);
  r.codes = codes;
  r.decided_at = {1};
  return r;
}

}  // namespace

TEST_CASE("hand fixture alpha") {
  auto r = krippendorff_alpha(matrix({{1, 1}, {0, 0}, {1, 0}, {0, 0}}));
  REQUIRE(r.alpha.has_value());
  CHECK(std::abs(*r.alpha - 0.5333) < 1e-4);
  CHECK(std::abs(*r.alpha - 8.0 / 15.0) < 1e-12);
  CHECK(r.units_used == 4);
  CHECK(r.pairable_values == 8);
}

TEST_CASE("perfect agreement is exactly one, degenerate cases are undefined") {
  auto r = krippendorff_alpha(matrix({{1, 1, 1}, {0, 0, std::nullopt}, {1, 1, 1}, {0, 0, 0}}));
  REQUIRE(r.alpha.has_value());
  CHECK(*r.alpha == 1.0);
  CHECK_FALSE(krippendorff_alpha(matrix({{1, 1}, {1, 1}})).alpha.has_value());
  CHECK_FALSE(krippendorff_alpha(matrix({{1, std::nullopt}, {std::nullopt, 0}})).alpha.has_value());
}

TEST_CASE("alpha matches the pairwise oracle on random matrices") {
  Rng rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto units = 1 + rng.below(10);
    const auto observers = 2 + rng.below(3);
    const auto alphabet = 2 + rng.below(3);
    std::vector<std::vector<std::optional<int>>> rows(units, std::vector<std::optional<int>>(observers));
    for (auto& row : rows)
      for (auto& v : row)
        if (!rng.bernoulli(0.25)) v = static_cast<int>(rng.below(alphabet));
    const auto got = krippendorff_alpha(matrix(rows)).alpha;
    const auto want = oracle::alpha_pairwise(rows);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(std::abs(*got - *want) < 1e-9);
      ++compared;
    }
  }
  CHECK(compared > 800);
}

TEST_CASE("agreement report from the label view") {
  LabelView view = LabelStore::replay({
      human("u1", "a", {MiCode::Reflection}),
      human("u1", "b", {MiCode::Reflection}),
      human("u2", "a", {MiCode::Support}),
      human("u2", "b", {MiCode::Support}),
      human("u3", "a", {MiCode::Reflection}),
      human("u3", "b", {MiCode::Support}),
      human("u4", "a", {MiCode::Support}),
      human("u4", "b", {MiCode::Support}),
      human("u4", "consensus", {MiCode::Affirm}),
  });
  auto rep = agreement_report(view);
  CHECK(std::abs(*rep.per_code[index_of(MiCode::Reflection)].alpha.alpha - 0.5333) < 1e-4);
  CHECK(std::abs(*rep.per_code[index_of(MiCode::Support)].alpha.alpha - 0.5333) < 1e-4);
  CHECK_FALSE(rep.per_code[index_of(MiCode::Direct)].alpha.alpha.has_value());
  CHECK_FALSE(rep.accepted(MiCode::Reflection));
  CHECK(rep.per_code[index_of(MiCode::Affirm)].positive_count == 1);
  const auto table = agreement_table(rep);
  CHECK(table.find("0.533") != std::string::npos);
  CHECK(table.find("NAN") != std::string::npos);
  CHECK(agreement_tsv(rep).find("Reflection\t") != std::string::npos);
}

TEST_CASE("human-model alpha degrades as model flips increase") {
  Rng rng(8);
  std::vector<LabelRecord> log;
  LabelMap truth;
  for (int i = 0; i < 400; ++i) {
    const std::string u = "u" + std::to_string(i);
    CodeSet s{rng.bernoulli(0.4) ? MiCode::Reflection : MiCode::Support};
    truth[u] = s;
    log.push_back(human(u, "a", s));
    CodeSet other = s;
    if (rng.bernoulli(0.05)) other = CodeSet{s.contains(MiCode::Reflection) ? MiCode::Support : MiCode::Reflection};
    log.push_back(human(u, "b", other));
  }
  auto view = LabelStore::replay(log);
  auto flipped = [&](double rate) {
    LabelMap m;
    Rng r(9);
    for (const auto& [u, s] : truth) {
      CodeSet x = s;
      if (r.bernoulli(rate)) x = CodeSet{s.contains(MiCode::Reflection) ? MiCode::Support : MiCode::Reflection};
      m[u] = x;
    }
    return m;
  };
  auto a0 = validation_sample(view, flipped(0.0), 100, 1).per_code[index_of(MiCode::Reflection)].human_model.alpha;
  auto a10 = validation_sample(view, flipped(0.1), 100, 1).per_code[index_of(MiCode::Reflection)].human_model.alpha;
  auto a30 = validation_sample(view, flipped(0.3), 100, 1).per_code[index_of(MiCode::Reflection)].human_model.alpha;
  CHECK(*a0 > *a10);
  CHECK(*a10 > *a30);
  auto v = validation_sample(view, flipped(0.1), 100, 1);
  CHECK(v.sampled.size() == 100);
  CHECK(v.sampled == validation_sample(view, flipped(0.1), 100, 1).sampled);
  CHECK_THROWS_AS(validation_sample(view, flipped(0.1), 500, 1), DataError);
}
