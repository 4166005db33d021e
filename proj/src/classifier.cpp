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

#include "micode/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "micode/error.hpp"
#include "micode/random.hpp"

namespace micode {

double logistic(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(-m)) without overflow.
double log_loss_margin(double m) noexcept { return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

double sparse_dot(const std::vector<double>& w, const FeatureVector& x) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < x.indices.size(); ++i) s += w[x.indices[i]] * x.values[i];
  return s;
}

}  // namespace

CodeClassifier::CodeClassifier(MiCode code, std::size_t k, std::vector<float> weights, double bias, Hyper hyper,
                               std::uint64_t training_set_hash, std::vector<double> epoch_losses)
    : code_(code),
      k_(k),
      weights_(std::move(weights)),
      bias_(bias),
      hyper_(hyper),
      training_set_hash_(training_set_hash),
      epoch_losses_(std::move(epoch_losses)) {
  if (weights_.size() != kFeatureDim)
    throw ModelError("bad_model", fmt::format("weight vector has {} entries, expected {}", weights_.size(), kFeatureDim));
}

double CodeClassifier::logit(const FeatureVector& x) const noexcept {
  double s = bias_;
  for (std::size_t i = 0; i < x.indices.size(); ++i) s += static_cast<double>(weights_[x.indices[i]]) * x.values[i];
  return s;
}

double CodeClassifier::probability(const FeatureVector& x) const noexcept { return logistic(logit(x)); }

void CodeClassifier::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("unwritable_file", fmt::format("cannot write model '{}'", path.string()));
    out << "micode-model 1\n";
    out << "code " << code_name(code_) << '\n';
    out << "k " << k_ << '\n';
    out << fmt::format("l2_penalty {:a}\n", hyper_.l2_penalty);
    out << "epochs " << hyper_.epochs << '\n';
    out << fmt::format("learning_rate {:a}\n", hyper_.learning_rate);
    out << "seed " << hyper_.seed << '\n';
    out << fmt::format("bias {:a}\n", bias_);
    out << fmt::format("training_set_hash {:016x}\n", training_set_hash_);
    out << "epoch_losses";
    for (double l : epoch_losses_) out << fmt::format(" {:a}", l);
    out << '\n';
    std::size_t nnz = 0;
    for (float w : weights_) nnz += w != 0.0f;
    out << "nonzero " << nnz << '\n';
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (weights_[i] != 0.0f) out << i << ' ' << fmt::format("{:a}", weights_[i]) << '\n';
    if (!out) throw DataError("unwritable_file", fmt::format("failed writing model '{}'", path.string()));
  }
  std::filesystem::rename(tmp, path);
}

CodeClassifier CodeClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("unreadable_model", fmt::format("cannot read model '{}'", path.string()));
  auto fail = [&](const std::string& what) {
    return ModelError("bad_model", fmt::format("model '{}': {}", path.string(), what));
  };
  auto expect_key = [&](std::istringstream& ls, std::string_view key) {
    std::string k;
    ls >> k;
    if (k != key) throw fail(fmt::format("expected '{}', found '{}'", key, k));
  };
  auto next_line = [&](std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) throw fail("truncated file");
    std::istringstream ls(line);
    expect_key(ls, key);
    std::string rest;
    std::getline(ls, rest);
    return rest.empty() ? rest : rest.substr(1);
  };
  auto parse_double = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw fail(fmt::format("bad number '{}'", s));
    return v;
  };

  std::string header;
  std::getline(in, header);
  if (header != "micode-model 1") throw fail("unsupported header");
  const auto code = parse_code(next_line("code"));
  if (!code) throw fail("unknown code");
  const std::size_t k = std::stoul(next_line("k"));
  Hyper h;
  h.l2_penalty = parse_double(next_line("l2_penalty"));
  h.epochs = std::stoi(next_line("epochs"));
  h.learning_rate = parse_double(next_line("learning_rate"));
  h.seed = std::stoull(next_line("seed"));
  const double bias = parse_double(next_line("bias"));
  const std::uint64_t hash = std::stoull(next_line("training_set_hash"), nullptr, 16);
  std::vector<double> losses;
  {
    std::istringstream ls(next_line("epoch_losses"));
    std::string tok;
    while (ls >> tok) losses.push_back(parse_double(tok));
  }
  const std::size_t nnz = std::stoul(next_line("nonzero"));
  std::vector<float> weights(kFeatureDim, 0.0f);
  for (std::size_t i = 0; i < nnz; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw fail("truncated weights");
    std::istringstream ls(line);
    std::size_t idx;
    std::string val;
    if (!(ls >> idx >> val) || idx >= kFeatureDim) throw fail("bad weight line");
    weights[idx] = std::strtof(val.c_str(), nullptr);
  }
  return CodeClassifier(*code, k, std::move(weights), bias, h, hash, std::move(losses));
}

std::uint64_t training_set_hash(std::span<const LabeledContext> examples) noexcept {
  std::uint64_t h = fnv1a64("micode-training-set");
  for (const auto& e : examples) {
    h = fnv1a64(e.cu.context_text, h);
    h = fnv1a64(e.is_positive ? "\x01" : "\x00", h);
  }
  return h;
}

CodeClassifier train_code_classifier(std::span<const LabeledContext> examples, MiCode code, std::size_t k,
                                     const Hyper& hyper) {
  std::vector<FeaturizedExample> fx;
  fx.reserve(examples.size());
  for (const auto& e : examples) {
    if (e.cu.k != k)
      throw ModelError("k_mismatch", fmt::format("training example built with k={}, model k={}", e.cu.k, k));
    fx.push_back({featurize(e.cu.context_text), e.is_positive});
  }
  return train_code_classifier(fx, code, k, hyper, training_set_hash(examples));
}

CodeClassifier train_code_classifier(std::span<const FeaturizedExample> examples, MiCode code, std::size_t k,
                                     const Hyper& hyper, std::uint64_t set_hash) {
  const std::size_t n = examples.size();
  const auto n_pos = static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(), [](const FeaturizedExample& e) { return e.positive; }));
  if (n_pos == 0 || n_pos == n) throw DataError("single_class", "single-class training set");
  if (hyper.epochs <= 0 || !(hyper.learning_rate > 0) || !(hyper.l2_penalty > 0))
    throw UsageError("bad_hyper", "epochs, learning_rate and l2_penalty must be positive");

  const double w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
  const double w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(n - n_pos));
  const double w_max = std::max(w_pos, w_neg);
  const double lambda = hyper.l2_penalty;
  const double lr0 = hyper.learning_rate / w_max;

  // Weights are stored as scale * v so the L2 shrink is O(1) per step.
  std::vector<double> v(kFeatureDim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  double sq_norm_v = 0.0;  // ||v||^2, tracked for the objective

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(hyper.epochs));
  std::uint64_t t = 0;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng rng(derive_seed(hyper.seed, "sgd-shuffle", static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t idx : order) {
      const auto& e = examples[idx];
      const double eta = lr0 / (1.0 + lr0 * lambda * static_cast<double>(t));
      ++t;
      const double z = scale * sparse_dot(v, e.x) + bias;
      const double y = e.positive ? 1.0 : 0.0;
      const double g = (e.positive ? w_pos : w_neg) * (logistic(z) - y);

      scale *= 1.0 - eta * lambda;
      if (g != 0.0) {
        const double step = -eta * g / scale;
        for (std::size_t j = 0; j < e.x.indices.size(); ++j) {
          double& vj = v[e.x.indices[j]];
          const double before = vj;
          vj += step * e.x.values[j];
          sq_norm_v += vj * vj - before * before;
        }
        bias -= eta * g;
      }
      if (scale < 1e-9) {
        for (double& vj : v) vj *= scale;
        sq_norm_v *= scale * scale;
        scale = 1.0;
      }
    }

    double loss = 0.0;
    double weight_sum = 0.0;
    for (const auto& e : examples) {
      const double w = e.positive ? w_pos : w_neg;
      const double z = scale * sparse_dot(v, e.x) + bias;
      loss += w * log_loss_margin(e.positive ? z : -z);
      weight_sum += w;
    }
    losses.push_back(loss / weight_sum + 0.5 * lambda * scale * scale * sq_norm_v);
  }

  std::vector<float> weights(kFeatureDim);
  for (std::size_t j = 0; j < kFeatureDim; ++j) weights[j] = static_cast<float>(scale * v[j]);
  return CodeClassifier(code, k, std::move(weights), bias, hyper, set_hash, std::move(losses));
}

double predict_code(const CodeClassifier& model, const ContextualUtterance& cu) {
  if (model.k() != cu.k)
    throw ModelError("k_mismatch", fmt::format("model for {} expects k={}, got k={}", code_name(model.code()),
                                               model.k(), cu.k));
  return model.probability(featurize(cu.context_text));
}

EvalReport eval_from_counts(MiCode code, std::size_t k, std::size_t tp, std::size_t fp, std::size_t fn,
                            std::size_t tn) {
  EvalReport r;
  r.code = code;
  r.k = k;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  r.support = tp + fn;
  r.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

EvalReport evaluate(const CodeClassifier& model, std::span<const FeaturizedExample> test, double threshold) {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& e : test) {
    const bool predicted = model.probability(e.x) >= threshold;
    if (predicted && e.positive) ++tp;
    else if (predicted) ++fp;
    else if (e.positive) ++fn;
    else ++tn;
  }
  return eval_from_counts(model.code(), model.k(), tp, fp, fn, tn);
}

EvalReport evaluate(const CodeClassifier& model, std::span<const LabeledContext> test, double threshold) {
  std::vector<FeaturizedExample> fx;
  fx.reserve(test.size());
  for (const auto& e : test) {
    if (e.cu.k != model.k())
      throw ModelError("k_mismatch", fmt::format("test example built with k={}, model k={}", e.cu.k, model.k()));
    fx.push_back({featurize(e.cu.context_text), e.is_positive});
  }
  return evaluate(model, fx, threshold);
}

SplitIndices stratified_split(std::span<const bool> labels, double test_fraction, std::uint64_t seed) {
  SplitIndices out;
  Rng rng(derive_seed(seed, "stratified-split"));
  for (const bool cls : {true, false}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace micode
