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

#include "helpers.hpp"
#include "micode/error.hpp"
#include "micode/simgen.hpp"
#include "micode/trends.hpp"
#include "oracles.hpp"

using namespace micode;
using testing::make_conversation;

TEST_CASE("Wilson interval matches the oracle and pins the boundaries") {
  for (auto [s, n] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 10}, {50, 100}, {3, 7}, {999, 1000}}) {
    auto [lo, hi] = proportion_ci(s, n);
    auto [olo, ohi] = oracle::wilson95(static_cast<double>(s), static_cast<double>(n));
    CHECK(std::abs(lo - olo) < 1e-12);
    CHECK(std::abs(hi - ohi) < 1e-12);
  }
  auto zero = proportion_ci(0, 20);
  CHECK(zero.first == 0.0);
  CHECK(zero.second > 0.0);
  auto all = proportion_ci(20, 20);
  CHECK(all.second == 1.0);
  CHECK(all.first < 1.0);
  CHECK_THROWS_AS(proportion_ci(0, 0), UsageError);
  auto wide = proportion_ci(5, 10, 0.99);
  auto narrow = proportion_ci(5, 10, 0.90);
  CHECK(wide.first < narrow.first);
}

TEST_CASE("bucket fractions count listener utterances by tenure") {
  using R = SpeakerRole;
  const std::int64_t day = kSecondsPerDay;
  Corpus corpus({
      make_conversation({"a", "L", "M", 0, {{R::Listener, "x"}, {R::Member, "m"}, {R::Listener, "y"}}}),
      make_conversation({"b", "L", "M", 40 * day, {{R::Listener, "x"}}}),
      make_conversation({"c", "L", "M", 400 * day, {{R::Listener, "x"}, {R::Listener, "y"}}}),
  });
  LabelMap labels = {{"a-u0", {MiCode::Introduction}}, {"a-u2", {MiCode::Reflection}},
                     {"b-u0", {MiCode::Introduction}}, {"c-u0", {MiCode::Introduction, MiCode::OpenQuestion}},
                     {"c-u1", {MiCode::Conclusion}}};
  auto s = code_fraction_by_bucket(corpus, labels);
  CHECK(s.listeners == 1);
  CHECK(s.at(MiCode::Introduction, TenureBucket::M0to1).utterance_count == 2);
  CHECK(*s.at(MiCode::Introduction, TenureBucket::M0to1).fraction == 0.5);
  CHECK(*s.at(MiCode::Introduction, TenureBucket::M1to6).fraction == 1.0);
  CHECK_FALSE(s.at(MiCode::Introduction, TenureBucket::M6to12).fraction.has_value());
  CHECK(*s.at(MiCode::Conclusion, TenureBucket::Y1plus).fraction == 0.5);
  const auto tsv = trend_tsv(s);
  CHECK(tsv.find("Introduction\tM6to12\t0\t0\tNA\tNA\tNA") != std::string::npos);
  CHECK(trend_svg(s).find("<svg") != std::string::npos);
  labels.erase("c-u1");
  CHECK_THROWS_AS(code_fraction_by_bucket(corpus, labels), DataError);
}

TEST_CASE("correlation levels match the two-pass oracle") {
  auto spec = preset("default", 3);
  spec.n_conversations = 120;
  spec.emit_text = false;
  auto g = generate_corpus(spec);
  auto labels = resolve_labels(g.labels);

  auto utt = cooccurrence_matrix(g.corpus, labels);
  auto conv = conversation_corr(g.corpus, labels);
  auto lis = listener_corr(g.corpus, labels);
  CHECK(conv.variables.back() == "Length");

  std::vector<std::vector<double>> u_cols(kNumCodes), c_cols(kNumCodes + 1);
  std::map<std::string, std::pair<double, std::array<double, kNumCodes>>> per;
  for (const auto& c : g.corpus.conversations()) {
    std::array<double, kNumCodes + 1> counts{};
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      const auto& s = labels.at(u.utterance_id);
      auto& [total, rates] = per[c.listener_id];
      total += 1;
      for (std::size_t k = 0; k < kNumCodes; ++k) {
        const double v = s.contains(kAllCodes[k]) ? 1.0 : 0.0;
        u_cols[k].push_back(v);
        counts[k] += v;
        rates[k] += v;
      }
    }
    counts[kNumCodes] = static_cast<double>(c.utterances.size());
    for (std::size_t k = 0; k <= kNumCodes; ++k) c_cols[k].push_back(counts[k]);
  }
  std::vector<std::vector<double>> l_cols(kNumCodes);
  for (const auto& [id, tr] : per)
    for (std::size_t k = 0; k < kNumCodes; ++k) l_cols[k].push_back(tr.second[k] / tr.first);

  auto compare = [](const CorrMatrix& m, const std::vector<std::vector<double>>& cols) {
    REQUIRE(m.size() == cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto want = oracle::pearson(cols[i], cols[j]);
        REQUIRE(m.at(i, j).has_value() == want.has_value());
        if (want) CHECK(std::abs(*m.at(i, j) - *want) < 1e-12);
      }
  };
  compare(utt, u_cols);
  compare(conv, c_cols);
  compare(lis, l_cols);
  CHECK(corr_tsv(utt).find("Introduction") != std::string::npos);
}

TEST_CASE("constant columns are undefined and tiny inputs are refused") {
  std::vector<CodeSet> rows = {{MiCode::Reflection}, {MiCode::Affirm}, {MiCode::Reflection, MiCode::Affirm}};
  auto m = cooccurrence_matrix(rows);
  const auto undefined = m.undefined_variables();
  CHECK(std::find(undefined.begin(), undefined.end(), "Direct") != undefined.end());
  CHECK(std::find(undefined.begin(), undefined.end(), "Reflection") == undefined.end());
  CHECK(corr_tsv(m).find("NA") != std::string::npos);
  CHECK_THROWS_AS(cooccurrence_matrix(std::vector<CodeSet>{{MiCode::Reflection}}), DataError);
}
