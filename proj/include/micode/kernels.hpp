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

// Data-parallel hot paths. Each kernel has a serial reference and an OpenMP
// version; both perform the same floating-point operations per output
// element, so their results are bitwise identical.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "micode/classifier.hpp"
#include "micode/codes.hpp"
#include "micode/corpus.hpp"
#include "micode/features.hpp"

namespace micode::kernels {

std::vector<FeatureVector> featurize_serial(std::span<const std::string> texts);
std::vector<FeatureVector> featurize_parallel(std::span<const std::string> texts);

// out[i] = model.logit(features[i]); out.size() must equal features.size().
void logits_serial(const CodeClassifier& model, std::span<const FeatureVector> features, std::span<double> out);
void logits_parallel(const CodeClassifier& model, std::span<const FeatureVector> features, std::span<double> out);

// Column-major rows x cols matrix of observations.
struct ColumnData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  ColumnData() = default;
  ColumnData(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return values[c * rows + r]; }
  double at(std::size_t r, std::size_t c) const { return values[c * rows + r]; }
};

// Two-pass Pearson correlation between all column pairs, cols x cols
// row-major. Cells touching a zero-variance column are NaN; the diagonal of
// a non-constant column is exactly 1.
std::vector<double> pearson_serial(const ColumnData& data);
std::vector<double> pearson_parallel(const ColumnData& data);

struct BucketObservation {
  TenureBucket bucket;
  CodeSet codes;
};

struct BucketCounts {
  std::array<std::size_t, kNumBuckets> utterances{};
  std::array<std::array<std::size_t, kNumCodes>, kNumBuckets> codes{};
  friend bool operator==(const BucketCounts&, const BucketCounts&) = default;
};

BucketCounts count_by_bucket_serial(std::span<const BucketObservation> obs);
BucketCounts count_by_bucket_parallel(std::span<const BucketObservation> obs);

// One-vs-all training: one classifier per entry of `codes`, positives where
// labels[i] contains the code. Per-code trainers share no mutable state.
std::vector<CodeClassifier> train_codes_serial(std::span<const FeatureVector> features, std::span<const CodeSet> labels,
                                               std::span<const MiCode> codes, std::size_t k, const Hyper& hyper,
                                               std::uint64_t set_hash);
std::vector<CodeClassifier> train_codes_parallel(std::span<const FeatureVector> features,
                                                 std::span<const CodeSet> labels, std::span<const MiCode> codes,
                                                 std::size_t k, const Hyper& hyper, std::uint64_t set_hash);

}  // namespace micode::kernels
