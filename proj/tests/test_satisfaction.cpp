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
#include <regex>

#include "helpers.hpp"
#include "micode/error.hpp"
#include "micode/satisfaction.hpp"
#include "oracles.hpp"

using namespace micode;
using testing::make_conversation;

namespace {

LogisticData problem(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                     const std::vector<double>& w, std::vector<std::string> names) {
  LogisticData d;
  d.n = x.size();
  d.p = x.at(0).size();
  for (const auto& row : x) d.x.insert(d.x.end(), row.begin(), row.end());
  d.y = y;
  d.w = w;
  d.names = std::move(names);
  return d;
}

// Small overlapping two-covariate dataset.
struct Small {
  std::vector<std::vector<double>> x;
  std::vector<double> y, w;
};

Small small_dataset(std::uint64_t seed, std::size_t n, bool weighted) {
  Rng rng(seed);
  Small s;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(rng.between(0, 4));
    const double b = rng.normal();
    const double eta = -0.3 + 0.4 * a - 0.7 * b;
    s.x.push_back({1.0, a, b});
    s.y.push_back(rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0);
  }
  double pos = 0;
  for (double v : s.y) pos += v;
  for (double v : s.y) s.w.push_back(weighted ? (v ? n / (2 * pos) : n / (2 * (n - pos))) : 1.0);
  return s;
}

}  // namespace

TEST_CASE("class weights") {
  auto w = class_weights(49892, 13120);
  CHECK(std::abs(w.satisfactory - 0.6315) < 5e-5);
  CHECK(std::abs(w.unsatisfactory - 2.4014) < 5e-5);
  CHECK(w.unsatisfactory / w.satisfactory == doctest::Approx(49892.0 / 13120.0).epsilon(1e-12));
  auto even = class_weights(50, 50);
  CHECK(even.satisfactory == 1.0);
  CHECK(even.unsatisfactory == 1.0);
  CHECK_THROWS_AS(class_weights(10, 0), DataError);
}

TEST_CASE("odds ratios and stars") {
  CHECK(std::abs(odds_ratio(0.522) - 1.685) < 1e-3);
  CHECK(std::abs(odds_ratio(-0.086) - 0.917) < 1e-3);
  CHECK(odds_ratio(0) == 1.0);
  for (double x = 1e-6; x <= 1e6; x *= 3.7) CHECK(std::abs(odds_ratio(std::log(x)) - x) <= 1e-12 * std::max(1.0, x));
  CHECK(significance_stars(0.0005) == "***");
  CHECK(significance_stars(0.005) == "**");
  CHECK(significance_stars(0.03) == "*");
  CHECK(significance_stars(0.07) == "⊙");
  CHECK(significance_stars(0.5) == "");
  CHECK(significance_stars(0.001) == "**");
}

TEST_CASE("intercept-only fit has the closed form") {
  std::vector<std::vector<double>> x(10, {1.0});
  std::vector<double> y = {1, 1, 1, 1, 1, 1, 1, 0, 0, 0};
  auto fit = fit_weighted_logistic(problem(x, y, std::vector<double>(10, 1.0), {"(Intercept)"}));
  CHECK(std::abs(fit.coefficients[0] - std::log(7.0 / 3.0)) < 1e-6);
  CHECK(std::abs(fit.coefficients[0] - 0.8473) < 1e-4);
  CHECK(fit.converged);
  CHECK(fit.aic == doctest::Approx(2 - 2 * fit.log_likelihood));
}

TEST_CASE("two-covariate fits match the grid oracle") {
  for (bool weighted : {false, true}) {
    auto s = small_dataset(weighted ? 11 : 12, 40, weighted);
    auto fit = fit_weighted_logistic(problem(s.x, s.y, s.w, {"(Intercept)", "a", "b"}));
    auto best = oracle::grid_argmax(
        [&](const std::vector<double>& b) { return oracle::weighted_loglik(s.x, s.y, s.w, b); }, 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fit.coefficients[j] - best[j]) < 1e-4);
    CHECK(fit.log_likelihood == doctest::Approx(oracle::weighted_loglik(s.x, s.y, s.w, fit.coefficients)));
  }
}

TEST_CASE("coefficients are invariant to global weight rescaling") {
  auto s = small_dataset(13, 200, true);
  auto base = fit_weighted_logistic(problem(s.x, s.y, s.w, {"(Intercept)", "a", "b"}));
  for (double k : {0.01, 3.0, 1000.0}) {
    auto w = s.w;
    for (auto& v : w) v *= k;
    auto scaled = fit_weighted_logistic(problem(s.x, s.y, w, {"(Intercept)", "a", "b"}));
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(scaled.coefficients[j] - base.coefficients[j]) < 1e-8);
    CHECK(scaled.log_likelihood == doctest::Approx(k * base.log_likelihood));
  }
}

TEST_CASE("an all-zero covariate is dropped without moving the others") {
  auto s = small_dataset(14, 150, true);
  auto base = fit_weighted_logistic(problem(s.x, s.y, s.w, {"(Intercept)", "a", "b"}));
  auto x = s.x;
  for (auto& row : x) row.push_back(0.0);
  auto fit = fit_weighted_logistic(problem(x, s.y, s.w, {"(Intercept)", "a", "b", "z"}));
  CHECK(fit.dropped == std::vector<std::string>{"z"});
  REQUIRE(fit.coefficients.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(fit.coefficients[j] - base.coefficients[j]) < 1e-8);
}

TEST_CASE("separation and bad input") {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back({1.0, static_cast<double>(i)});
    y.push_back(i >= 10 ? 1.0 : 0.0);
  }
  try {
    fit_weighted_logistic(problem(x, y, std::vector<double>(20, 1.0), {"(Intercept)", "dose"}));
    FAIL("expected separation");
  } catch (const ModelError& e) {
    CHECK(e.code() == "separation");
    CHECK(std::string(e.what()).find("dose") != std::string::npos);
  }
  std::vector<double> few = {1, 0, 0, 0};
  std::vector<std::vector<double>> x4(4, {1.0});
  CHECK_THROWS_AS(fit_weighted_logistic(problem(x4, few, std::vector<double>(4, 1.0), {"(Intercept)"})), DataError);
}

TEST_CASE("design rows, past ratings and design consistency") {
  using R = SpeakerRole;
  std::vector<Conversation> convs = {
      make_conversation({"a", "L1", "M1", 100, {{R::Listener, "x"}, {R::Member, "y"}, {R::Listener, "z"}}, 5}),
      make_conversation({"b", "L1", "M1", 200, {{R::Listener, "x"}}, 4}),
      make_conversation({"c", "L2", "M1", 300, {{R::Listener, "x"}, {R::Listener, "y"}}, 2}),
      make_conversation({"d", "L2", "M2", 400, {{R::Listener, "x"}}, 3}),
      make_conversation({"e", "L2", "M3", 500, {{R::Listener, "x"}}, std::nullopt}),
  };
  convs[3].member_age = std::nullopt;
  Corpus corpus(convs);
  LabelMap labels = {{"a-u0", {MiCode::Reflection}}, {"a-u2", {MiCode::Reflection, MiCode::Affirm}},
                     {"b-u0", {MiCode::Other}},      {"c-u0", {MiCode::Reflection}},
                     {"c-u1", {MiCode::Direct}},     {"d-u0", {MiCode::Support}}};
  auto d = build_design(corpus, labels);
  CHECK(d.conversations == 5);
  CHECK(d.rated == 4);
  CHECK(d.excluded_unrated == 1);
  CHECK(d.excluded_missing_age == 1);
  CHECK(d.global_mean_rating == doctest::Approx(3.5));
  REQUIRE(d.rows.size() == 3);
  CHECK(d.rows[0].counts[index_of(MiCode::Reflection)] == 2);
  CHECK(d.rows[0].counts[index_of(MiCode::Affirm)] == 1);
  CHECK(d.rows[2].member_past_avg_rating == doctest::Approx(4.5));
  CHECK(d.rows[2].outcome == SatisfactionClass::Unsatisfactory);
  CHECK(d.rows[0].member_past_avg_rating == doctest::Approx(3.0));

  auto t = build_design(corpus, labels, PastRatingMode::Temporal);
  CHECK(t.rows[0].member_past_avg_rating == doctest::Approx(3.5));
  CHECK(t.rows[1].member_past_avg_rating == doctest::Approx(5.0));
  CHECK(t.rows[2].member_past_avg_rating == doctest::Approx(4.5));

  std::array<int, kNumCovariateCodes> sums{};
  for (const auto& r : d.rows)
    for (std::size_t c = 0; c < kNumCovariateCodes; ++c) sums[c] += r.counts[c];
  std::array<int, kNumCovariateCodes> expected{};
  for (const auto& row : d.rows)
    for (const auto& u : corpus.find_conversation(row.conversation_id)->utterances)
      if (auto it = labels.find(u.utterance_id); it != labels.end())
        for (auto c : it->second.to_vector())
          if (c != MiCode::Other) ++expected[index_of(c)];
  CHECK(sums == expected);

  labels.erase("c-u1");
  CHECK_THROWS_AS(build_design(corpus, labels), DataError);
}

TEST_CASE("table rows follow the reported layout") {
  RegressionFit fit;
  fit.names = {"(Intercept)", "Reflection", "MemberPastAverageRating"};
  fit.coefficients = {0.1, 0.0347, 0.522};
  fit.standard_errors = {0.1, 0.01, 0.01};
  fit.z_scores = {1, 3.5, 52};
  fit.p_values = {0.3, 0.0002, 1e-20};
  for (double b : fit.coefficients) fit.odds_ratios.push_back(odds_ratio(b));
  fit.aic = 97800;
  fit.converged = true;
  const auto table = satisfaction_table(fit);
  const std::regex reflection(R"(\nReflection\s+0\.035\*\*\*\s+1\.035\n)");
  CHECK(std::regex_search(table, reflection));
  CHECK(std::regex_search(table, std::regex(R"(\nMember Past Average Rating\s+0\.522\*\*\*\s+1\.685\n)")));
  CHECK(table.find("AIC of Model 97800.0") != std::string::npos);
  CHECK(table.find(std::string(kStarLegend)) != std::string::npos);
  CHECK(table.find("MI-Consistent\n") < table.find("MI-Inconsistent\n"));
  CHECK(table.find("Control Variables") != std::string::npos);
  CHECK(satisfaction_table(fit) == table);
  CHECK(satisfaction_tsv(fit).find("Reflection\t0.0347") != std::string::npos);
}
