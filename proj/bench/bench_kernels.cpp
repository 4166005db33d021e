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

#include <benchmark/benchmark.h>

#include "micode/kernels.hpp"
#include "micode/labels.hpp"
#include "micode/random.hpp"
#include "micode/simgen.hpp"

using namespace micode;

namespace {

struct Workload {
  std::vector<std::string> texts;
  std::vector<CodeSet> labels;
  std::vector<FeatureVector> features;
};

const Workload& workload() {
  static const Workload w = [] {
    auto spec = preset("separable", 11);
    spec.n_conversations = 300;
    const auto g = generate_corpus(spec);
    const auto labels = resolve_labels(g.labels);
    Workload out;
    for (const auto& c : g.corpus.conversations())
      for (const auto& u : c.utterances)
        if (u.speaker == SpeakerRole::Listener) {
          out.texts.push_back(u.text);
          out.labels.push_back(labels.at(u.utterance_id));
        }
    out.features = kernels::featurize_serial(out.texts);
    return out;
  }();
  return w;
}

const CodeClassifier& model() {
  static const CodeClassifier m = [] {
    Hyper h;
    h.epochs = 2;
    const std::array<MiCode, 1> codes = {MiCode::Reflection};
    return kernels::train_codes_serial(workload().features, workload().labels, codes, 0, h, 1).front();
  }();
  return m;
}

kernels::ColumnData columns(std::size_t rows, std::size_t cols) {
  kernels::ColumnData d(rows, cols);
  Rng rng(5);
  for (auto& v : d.values) v = rng.bernoulli(0.2) ? 1.0 : 0.0;
  return d;
}

std::vector<kernels::BucketObservation> observations(std::size_t n) {
  std::vector<kernels::BucketObservation> obs(n);
  Rng rng(6);
  for (auto& o : obs) {
    o.bucket = kAllBuckets[rng.below(kNumBuckets)];
    o.codes.insert(kAllCodes[rng.below(kNumCodes)]);
  }
  return obs;
}

template <bool Parallel>
void BM_featurize(benchmark::State& state) {
  const auto& texts = workload().texts;
  for (auto _ : state) {
    auto f = Parallel ? kernels::featurize_parallel(texts) : kernels::featurize_serial(texts);
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(texts.size()));
}

template <bool Parallel>
void BM_logits(benchmark::State& state) {
  const auto& f = workload().features;
  const auto& m = model();
  std::vector<double> out(f.size());
  for (auto _ : state) {
    if (Parallel)
      kernels::logits_parallel(m, f, out);
    else
      kernels::logits_serial(m, f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}

template <bool Parallel>
void BM_pearson(benchmark::State& state) {
  const auto d = columns(static_cast<std::size_t>(state.range(0)), 18);
  for (auto _ : state) {
    auto r = Parallel ? kernels::pearson_parallel(d) : kernels::pearson_serial(d);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void BM_buckets(benchmark::State& state) {
  const auto obs = observations(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto c = Parallel ? kernels::count_by_bucket_parallel(obs) : kernels::count_by_bucket_serial(obs);
    benchmark::DoNotOptimize(c);
  }
}

template <bool Parallel>
void BM_train(benchmark::State& state) {
  const auto& w = workload();
  Hyper h;
  h.epochs = 2;
  const std::array<MiCode, 4> codes = {MiCode::Reflection, MiCode::Affirm, MiCode::Support, MiCode::Direct};
  for (auto _ : state) {
    auto models = Parallel ? kernels::train_codes_parallel(w.features, w.labels, codes, 0, h, 1)
                           : kernels::train_codes_serial(w.features, w.labels, codes, 0, h, 1);
    benchmark::DoNotOptimize(models.data());
  }
}

}  // namespace

BENCHMARK(BM_featurize<false>)->Name("featurize/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_featurize<true>)->Name("featurize/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_logits<false>)->Name("logits/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_logits<true>)->Name("logits/parallel")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_pearson<false>)->Name("pearson/serial")->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pearson<true>)->Name("pearson/parallel")->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_buckets<false>)->Name("buckets/serial")->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_buckets<true>)->Name("buckets/parallel")->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_train<false>)->Name("train/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_train<true>)->Name("train/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
