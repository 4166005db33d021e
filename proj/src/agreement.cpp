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

#include "micode/agreement.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "micode/error.hpp"
#include "micode/random.hpp"

namespace micode {

AlphaResult krippendorff_alpha(const ReliabilityMatrix& matrix) {
  const std::size_t n_obs = matrix.observers.size();
  if (matrix.values.size() != matrix.units.size() * n_obs)
    throw UsageError("bad_shape", "reliability matrix has the wrong number of cells");

  // Sparse coincidence matrix over the observed value alphabet.
  std::map<std::pair<int, int>, double> o;
  std::map<int, double> n_c;
  AlphaResult result;
  std::vector<int> vals;
  for (std::size_t u = 0; u < matrix.units.size(); ++u) {
    vals.clear();
    for (std::size_t j = 0; j < n_obs; ++j)
      if (const auto& v = matrix.at(u, j)) vals.push_back(*v);
    const std::size_t m = vals.size();
    if (m < 2) continue;
    ++result.units_used;
    result.pairable_values += m;
    std::map<int, std::size_t> counts;
    for (int v : vals) ++counts[v];
    const double w = 1.0 / static_cast<double>(m - 1);
    for (const auto& [c, nc] : counts) {
      for (const auto& [k, nk] : counts) {
        const double pairs = c == k ? static_cast<double>(nc) * static_cast<double>(nc - 1)
                                    : static_cast<double>(nc) * static_cast<double>(nk);
        if (pairs > 0) o[{c, k}] += pairs * w;
      }
    }
  }
  if (result.units_used == 0) return result;

  for (const auto& [ck, v] : o) n_c[ck.first] += v;
  double n = 0.0;
  for (const auto& [c, v] : n_c) n += v;

  double observed = 0.0;
  for (const auto& [ck, v] : o)
    if (ck.first != ck.second) observed += v;
  double expected = 0.0;
  for (const auto& [c, vc] : n_c)
    for (const auto& [k, vk] : n_c)
      if (c != k) expected += vc * vk;
  if (expected <= 0.0) return result;
  result.alpha = 1.0 - (n - 1.0) * observed / expected;
  return result;
}

namespace {

// Human annotators (consensus excluded) and their latest code sets.
struct HumanTable {
  std::vector<std::string> annotators;
  std::map<std::string, std::map<std::string, CodeSet>> by_utterance;  // utterance -> annotator -> codes
};

HumanTable human_table(const LabelView& view) {
  HumanTable t;
  std::set<std::string> annotators;
  for (const auto& [key, r] : view.current) {
    if (!r.source.is_human() || r.source.is_consensus()) continue;
    annotators.insert(r.source.id);
    t.by_utterance[r.utterance_id][r.source.id] = r.codes;
  }
  t.annotators.assign(annotators.begin(), annotators.end());
  return t;
}

ReliabilityMatrix build_matrix(const HumanTable& t, MiCode code, std::span<const std::string> units,
                               const LabelMap* extra, const std::string& extra_name) {
  std::vector<std::string> unit_ids;
  if (units.empty()) {
    for (const auto& [u, _] : t.by_utterance) unit_ids.push_back(u);
  } else {
    unit_ids.assign(units.begin(), units.end());
  }
  auto observers = t.annotators;
  if (extra) observers.push_back(extra_name);
  ReliabilityMatrix m(unit_ids, observers);
  for (std::size_t u = 0; u < unit_ids.size(); ++u) {
    if (auto it = t.by_utterance.find(unit_ids[u]); it != t.by_utterance.end()) {
      for (std::size_t j = 0; j < t.annotators.size(); ++j)
        if (auto a = it->second.find(t.annotators[j]); a != it->second.end())
          m.at(u, j) = a->second.contains(code) ? 1 : 0;
    }
    if (extra)
      if (auto e = extra->find(unit_ids[u]); e != extra->end())
        m.at(u, observers.size() - 1) = e->second.contains(code) ? 1 : 0;
  }
  return m;
}

ReliabilityMatrix pooled_matrix(const HumanTable& t, std::span<const std::string> units, const LabelMap* extra,
                                const std::string& extra_name) {
  ReliabilityMatrix pooled;
  for (auto c : kAllCodes) {
    auto m = build_matrix(t, c, units, extra, extra_name);
    if (pooled.observers.empty()) pooled.observers = m.observers;
    for (std::size_t u = 0; u < m.units.size(); ++u) {
      pooled.units.push_back(m.units[u] + "#" + std::string(code_name(c)));
      for (std::size_t j = 0; j < m.observers.size(); ++j) pooled.values.push_back(m.at(u, j));
    }
  }
  return pooled;
}

}  // namespace

ReliabilityMatrix reliability_for_code(const LabelView& view, MiCode code, std::span<const std::string> units,
                                       const LabelMap* extra, const std::string& extra_name) {
  return build_matrix(human_table(view), code, units, extra, extra_name);
}

AgreementReport agreement_report(const LabelView& view, double acceptance_threshold) {
  const auto table = human_table(view);
  AgreementReport report;
  report.acceptance_threshold = acceptance_threshold;
  const auto resolved = resolve_labels(view.human_records());
  for (auto c : kAllCodes) {
    auto& row = report.per_code[index_of(c)];
    row.code = c;
    row.alpha = krippendorff_alpha(build_matrix(table, c, {}, nullptr, {}));
    for (const auto& [utt, codes] : resolved) row.positive_count += codes.contains(c);
  }
  report.cumulative = krippendorff_alpha(pooled_matrix(table, {}, nullptr, {}));
  return report;
}

ValidationReport validation_sample(const LabelView& view, const LabelMap& model_labels, std::size_t n,
                                   std::uint64_t seed) {
  const auto table = human_table(view);
  std::vector<std::string> candidates;
  for (const auto& [utt, _] : table.by_utterance)
    if (model_labels.count(utt)) candidates.push_back(utt);
  if (candidates.size() < n)
    throw DataError("insufficient_labels",
                    fmt::format("validation needs {} labeled utterances, only {} available", n, candidates.size()));

  Rng rng(derive_seed(seed, "validation-sample"));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(n);
  std::sort(candidates.begin(), candidates.end());

  ValidationReport report;
  report.sampled = candidates;
  for (auto c : kAllCodes) {
    auto& row = report.per_code[index_of(c)];
    row.code = c;
    row.inter_human = krippendorff_alpha(build_matrix(table, c, candidates, nullptr, {}));
    row.human_model = krippendorff_alpha(build_matrix(table, c, candidates, &model_labels, "model"));
  }
  report.cumulative_inter_human = krippendorff_alpha(pooled_matrix(table, candidates, nullptr, {}));
  report.cumulative_human_model = krippendorff_alpha(pooled_matrix(table, candidates, &model_labels, "model"));
  return report;
}

std::string format_alpha(const AlphaResult& a) { return a.alpha ? fmt::format("{:.3f}", *a.alpha) : "NAN"; }

std::string agreement_table(const AgreementReport& report) {
  std::string out = fmt::format("{:<24} {:>12} {:>10} {:>8}\n", "Category", "#Utterances", "alpha", "units");
  for (const auto& row : report.per_code)
    out += fmt::format("{:<24} {:>12} {:>10} {:>8}{}\n", display_name(row.code), row.positive_count,
                       format_alpha(row.alpha), row.alpha.units_used,
                       report.accepted(row.code) || !row.alpha.alpha ? "" : "  (below threshold)");
  out += fmt::format("{:<24} {:>12} {:>10} {:>8}\n", "Cumulative", "", format_alpha(report.cumulative),
                     report.cumulative.units_used);
  out += fmt::format("acceptance threshold: {:.2f}\n", report.acceptance_threshold);
  return out;
}

std::string agreement_tsv(const AgreementReport& report) {
  std::string out = "code\tpositive_count\talpha\tunits_used\tpairable_values\n";
  auto alpha_field = [](const AlphaResult& a) { return a.alpha ? fmt::format("{:.17g}", *a.alpha) : "undefined"; };
  for (const auto& row : report.per_code)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", code_name(row.code), row.positive_count, alpha_field(row.alpha),
                       row.alpha.units_used, row.alpha.pairable_values);
  out += fmt::format("cumulative\t\t{}\t{}\t{}\n", alpha_field(report.cumulative), report.cumulative.units_used,
                     report.cumulative.pairable_values);
  return out;
}

std::string validation_table(const ValidationReport& report) {
  std::string out = fmt::format("{:<24} {:>16} {:>16}\n", "Class", "Inter-annotator", "Model-annotators");
  for (const auto& row : report.per_code) {
    if (row.code == MiCode::Other) continue;
    out += fmt::format("{:<24} {:>16} {:>16}\n", display_name(row.code), format_alpha(row.inter_human),
                       format_alpha(row.human_model));
  }
  out += fmt::format("{:<24} {:>16} {:>16}\n", "Cumulative Agreement", format_alpha(report.cumulative_inter_human),
                     format_alpha(report.cumulative_human_model));
  out += fmt::format("sampled utterances: {}\n", report.sampled.size());
  return out;
}

std::string validation_tsv(const ValidationReport& report) {
  auto f = [](const AlphaResult& a) { return a.alpha ? fmt::format("{:.17g}", *a.alpha) : "undefined"; };
  std::string out = "code\tinter_human\thuman_model\n";
  for (const auto& row : report.per_code)
    out += fmt::format("{}\t{}\t{}\n", code_name(row.code), f(row.inter_human), f(row.human_model));
  out += fmt::format("cumulative\t{}\t{}\n", f(report.cumulative_inter_human), f(report.cumulative_human_model));
  return out;
}

}  // namespace micode
