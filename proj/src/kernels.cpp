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

#include "micode/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>

#include <omp.h>

#include "micode/error.hpp"

namespace micode::kernels {

std::vector<FeatureVector> featurize_serial(std::span<const std::string> texts) {
  std::vector<FeatureVector> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) out[i] = featurize(texts[i]);
  return out;
}

std::vector<FeatureVector> featurize_parallel(std::span<const std::string> texts) {
  std::vector<FeatureVector> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = featurize(texts[static_cast<std::size_t>(i)]);
  return out;
}

void logits_serial(const CodeClassifier& model, std::span<const FeatureVector> features, std::span<double> out) {
  if (out.size() != features.size()) throw UsageError("size_mismatch", "logits output size mismatch");
  for (std::size_t i = 0; i < features.size(); ++i) out[i] = model.logit(features[i]);
}

void logits_parallel(const CodeClassifier& model, std::span<const FeatureVector> features, std::span<double> out) {
  if (out.size() != features.size()) throw UsageError("size_mismatch", "logits output size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(features.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = model.logit(features[static_cast<std::size_t>(i)]);
}

namespace {

struct Centered {
  std::vector<double> values;  // column-major, mean removed
  std::vector<double> sum_sq;  // per column
};

void center_column(const ColumnData& data, std::size_t c, Centered& out) {
  const double* col = data.values.data() + c * data.rows;
  double mean = 0.0;
  for (std::size_t r = 0; r < data.rows; ++r) mean += col[r];
  mean /= static_cast<double>(data.rows);
  double ss = 0.0;
  double* dst = out.values.data() + c * data.rows;
  for (std::size_t r = 0; r < data.rows; ++r) {
    dst[r] = col[r] - mean;
    ss += dst[r] * dst[r];
  }
  out.sum_sq[c] = ss;
}

void pearson_row(const ColumnData& data, const Centered& ctr, std::size_t i, std::vector<double>& r) {
  const std::size_t m = data.cols;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const double* xi = ctr.values.data() + i * data.rows;
  for (std::size_t j = i; j < m; ++j) {
    double cell = nan;
    if (ctr.sum_sq[i] > 0.0 && ctr.sum_sq[j] > 0.0) {
      if (i == j) {
        cell = 1.0;
      } else {
        const double* xj = ctr.values.data() + j * data.rows;
        double sxy = 0.0;
        for (std::size_t k = 0; k < data.rows; ++k) sxy += xi[k] * xj[k];
        cell = std::clamp(sxy / std::sqrt(ctr.sum_sq[i] * ctr.sum_sq[j]), -1.0, 1.0);
      }
    }
    r[i * m + j] = cell;
    r[j * m + i] = cell;
  }
}

void check_shape(const ColumnData& data) {
  if (data.values.size() != data.rows * data.cols) throw UsageError("bad_shape", "column data has wrong size");
  if (data.rows < 2) throw DataError("too_few_rows", "correlation needs at least 2 observations");
}

}  // namespace

std::vector<double> pearson_serial(const ColumnData& data) {
  check_shape(data);
  Centered ctr{std::vector<double>(data.values.size()), std::vector<double>(data.cols)};
  for (std::size_t c = 0; c < data.cols; ++c) center_column(data, c, ctr);
  std::vector<double> r(data.cols * data.cols);
  for (std::size_t i = 0; i < data.cols; ++i) pearson_row(data, ctr, i, r);
  return r;
}

std::vector<double> pearson_parallel(const ColumnData& data) {
  check_shape(data);
  Centered ctr{std::vector<double>(data.values.size()), std::vector<double>(data.cols)};
  const auto m = static_cast<std::ptrdiff_t>(data.cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < m; ++c) center_column(data, static_cast<std::size_t>(c), ctr);
  std::vector<double> r(data.cols * data.cols);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < m; ++i) pearson_row(data, ctr, static_cast<std::size_t>(i), r);
  return r;
}

namespace {

void accumulate(BucketCounts& acc, const BucketObservation& o) {
  const auto b = static_cast<std::size_t>(o.bucket);
  ++acc.utterances[b];
  for (auto c : kAllCodes)
    if (o.codes.contains(c)) ++acc.codes[b][index_of(c)];
}

void merge(BucketCounts& into, const BucketCounts& from) {
  for (std::size_t b = 0; b < kNumBuckets; ++b) {
    into.utterances[b] += from.utterances[b];
    for (std::size_t c = 0; c < kNumCodes; ++c) into.codes[b][c] += from.codes[b][c];
  }
}

}  // namespace

BucketCounts count_by_bucket_serial(std::span<const BucketObservation> obs) {
  BucketCounts acc;
  for (const auto& o : obs) accumulate(acc, o);
  return acc;
}

BucketCounts count_by_bucket_parallel(std::span<const BucketObservation> obs) {
  BucketCounts total;
  const auto n = static_cast<std::ptrdiff_t>(obs.size());
#pragma omp parallel
  {
    BucketCounts local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) accumulate(local, obs[static_cast<std::size_t>(i)]);
#pragma omp critical
    merge(total, local);
  }
  return total;
}

namespace {

std::vector<FeaturizedExample> examples_for(std::span<const FeatureVector> features, std::span<const CodeSet> labels,
                                            MiCode code) {
  std::vector<FeaturizedExample> ex(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) ex[i] = {features[i], labels[i].contains(code)};
  return ex;
}

void check_training_inputs(std::span<const FeatureVector> features, std::span<const CodeSet> labels) {
  if (features.size() != labels.size()) throw UsageError("size_mismatch", "features and labels differ in length");
}

}  // namespace

std::vector<CodeClassifier> train_codes_serial(std::span<const FeatureVector> features, std::span<const CodeSet> labels,
                                               std::span<const MiCode> codes, std::size_t k, const Hyper& hyper,
                                               std::uint64_t set_hash) {
  check_training_inputs(features, labels);
  std::vector<CodeClassifier> out;
  out.reserve(codes.size());
  for (auto c : codes) out.push_back(train_code_classifier(examples_for(features, labels, c), c, k, hyper, set_hash));
  return out;
}

std::vector<CodeClassifier> train_codes_parallel(std::span<const FeatureVector> features,
                                                 std::span<const CodeSet> labels, std::span<const MiCode> codes,
                                                 std::size_t k, const Hyper& hyper, std::uint64_t set_hash) {
  check_training_inputs(features, labels);
  std::vector<std::optional<CodeClassifier>> slots(codes.size());
  std::vector<std::exception_ptr> errors(codes.size());
  const auto n = static_cast<std::ptrdiff_t>(codes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      slots[u].emplace(train_code_classifier(examples_for(features, labels, codes[u]), codes[u], k, hyper, set_hash));
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<CodeClassifier> out;
  out.reserve(codes.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace micode::kernels
