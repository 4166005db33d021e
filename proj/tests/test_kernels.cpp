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

#include "micode/classifier.hpp"
#include "micode/kernels.hpp"
#include "micode/random.hpp"
#include "oracles.hpp"

using namespace micode;
namespace k = micode::kernels;

namespace {

std::vector<std::string> random_texts(std::size_t n, std::uint64_t seed) {
  const std::vector<std::string> words = {"hello", "how", "are", "you", "feel", "sad", "great", "⟂", "ok", "zumba"};
  Rng rng(seed);
  std::vector<std::string> out(n);
  for (auto& t : out) {
    const auto len = rng.between(0, 12);
    for (std::int64_t i = 0; i < len; ++i) t += words[rng.below(words.size())] + " ";
  }
  return out;
}

}  // namespace

TEST_CASE("featurize kernels agree") {
  const auto texts = random_texts(300, 1);
  CHECK(k::featurize_serial(texts) == k::featurize_parallel(texts));
}

TEST_CASE("logit kernels agree") {
  const auto texts = random_texts(200, 2);
  const auto fx = k::featurize_serial(texts);
  std::vector<float> w(kFeatureDim);
  Rng rng(3);
  for (auto& x : w) x = static_cast<float>(rng.normal());
  CodeClassifier m(MiCode::Affirm, 0, w, 0.3, Hyper{}, 0);
  std::vector<double> a(fx.size()), b(fx.size());
  k::logits_serial(m, fx, a);
  k::logits_parallel(m, fx, b);
  CHECK(a == b);
  CHECK(a[5] == doctest::Approx(m.logit(fx[5])));
}

TEST_CASE("pearson kernels agree with each other and with the two-pass oracle") {
  Rng rng(4);
  k::ColumnData d(57, 9);
  for (std::size_t r = 0; r < d.rows; ++r)
    for (std::size_t c = 0; c < d.cols; ++c) d.at(r, c) = c == 8 ? 1.0 : (c < 4 ? rng.bernoulli(0.3) : rng.normal());
  const auto s = k::pearson_serial(d);
  const auto p = k::pearson_parallel(d);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::isnan(s[i]))
      CHECK(std::isnan(p[i]));
    else
      CHECK(s[i] == p[i]);
  }
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      std::vector<double> x(d.rows), y(d.rows);
      for (std::size_t r = 0; r < d.rows; ++r) {
        x[r] = d.at(r, i);
        y[r] = d.at(r, j);
      }
      CHECK(std::abs(s[i * 9 + j] - *oracle::pearson(x, y)) < 1e-12);
    }
  CHECK(std::isnan(s[8 * 9 + 0]));
}

TEST_CASE("bucket counting kernels agree") {
  Rng rng(5);
  std::vector<k::BucketObservation> obs(10000);
  for (auto& o : obs) {
    o.bucket = kAllBuckets[rng.below(4)];
    o.codes.insert(kAllCodes[rng.below(17)]);
    if (rng.bernoulli(0.3)) o.codes.insert(kAllCodes[rng.below(17)]);
  }
  const auto a = k::count_by_bucket_serial(obs);
  CHECK(a == k::count_by_bucket_parallel(obs));
  std::size_t total = 0;
  for (auto n : a.utterances) total += n;
  CHECK(total == obs.size());
}

TEST_CASE("multi-code training kernels agree") {
  const auto texts = random_texts(150, 6);
  const auto fx = k::featurize_serial(texts);
  std::vector<CodeSet> labels(fx.size());
  for (std::size_t i = 0; i < fx.size(); ++i) {
    if (texts[i].find("sad") != std::string::npos) labels[i].insert(MiCode::Reflection);
    if (texts[i].find("great") != std::string::npos) labels[i].insert(MiCode::Affirm);
  }
  const std::vector<MiCode> codes = {MiCode::Reflection, MiCode::Affirm};
  Hyper h;
  h.epochs = 3;
  const auto a = k::train_codes_serial(fx, labels, codes, 0, h, 11);
  const auto b = k::train_codes_parallel(fx, labels, codes, 0, h, 11);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a[i].code() == b[i].code());
    CHECK(a[i].weights() == b[i].weights());
    CHECK(a[i].bias() == b[i].bias());
  }
}
