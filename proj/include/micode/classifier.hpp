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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/features.hpp"

namespace micode {

struct Hyper {
  double l2_penalty = 1e-4;
  int epochs = 20;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
};

struct LabeledContext {
  ContextualUtterance cu;
  bool is_positive = false;
};

struct FeaturizedExample {
  FeatureVector x;
  bool positive = false;
};

// Binary logistic model for one code at one context size. Immutable once
// trained.
class CodeClassifier {
 public:
  CodeClassifier(MiCode code, std::size_t k, std::vector<float> weights, double bias, Hyper hyper,
                 std::uint64_t training_set_hash, std::vector<double> epoch_losses = {});

  MiCode code() const noexcept { return code_; }
  std::size_t k() const noexcept { return k_; }
  const std::vector<float>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const Hyper& hyper() const noexcept { return hyper_; }
  std::uint64_t training_set_hash() const noexcept { return training_set_hash_; }
  // Regularized training objective after each epoch.
  const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }

  double logit(const FeatureVector& x) const noexcept;
  double probability(const FeatureVector& x) const noexcept;

  // Text format with hex floats, so save/load is exact.
  void save(const std::filesystem::path& path) const;
  static CodeClassifier load(const std::filesystem::path& path);

 private:
  MiCode code_;
  std::size_t k_;
  std::vector<float> weights_;
  double bias_;
  Hyper hyper_;
  std::uint64_t training_set_hash_;
  std::vector<double> epoch_losses_;
};

double logistic(double z) noexcept;

std::uint64_t training_set_hash(std::span<const LabeledContext> examples) noexcept;

// Inverse-frequency weighted, L2-regularized logistic regression fitted by
// seeded-shuffle SGD with step size lr / (1 + lr * l2 * t), lr scaled down
// by the largest example weight. Throws DataError("single_class") when the
// examples hold only one class.
CodeClassifier train_code_classifier(std::span<const LabeledContext> examples, MiCode code, std::size_t k,
                                     const Hyper& hyper);
CodeClassifier train_code_classifier(std::span<const FeaturizedExample> examples, MiCode code, std::size_t k,
                                     const Hyper& hyper, std::uint64_t set_hash);

// Throws ModelError when the model's k differs from cu.k.
double predict_code(const CodeClassifier& model, const ContextualUtterance& cu);

struct EvalReport {
  MiCode code = MiCode::Other;
  std::size_t k = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t support = 0;  // positives in the test set
};

// Positive-class scores from confusion counts; 0 wherever a denominator is 0.
EvalReport eval_from_counts(MiCode code, std::size_t k, std::size_t tp, std::size_t fp, std::size_t fn,
                            std::size_t tn);
EvalReport evaluate(const CodeClassifier& model, std::span<const LabeledContext> test, double threshold = 0.5);
EvalReport evaluate(const CodeClassifier& model, std::span<const FeaturizedExample> test, double threshold = 0.5);

// Seeded split, stratified by label, `test_fraction` of each class held out.
struct SplitIndices {
  std::vector<std::size_t> train, test;
};
SplitIndices stratified_split(std::span<const bool> labels, double test_fraction, std::uint64_t seed);

}  // namespace micode
