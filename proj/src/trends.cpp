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

#include "micode/trends.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "micode/error.hpp"
#include "micode/kernels.hpp"

namespace micode {

std::pair<double, double> proportion_ci(std::size_t successes, std::size_t total, double level) {
  if (total == 0) throw UsageError("empty_sample", "proportion interval needs total > 0");
  if (successes > total) throw UsageError("bad_count", "successes exceed total");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("bad_level", "confidence level must lie in (0,1)");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  double lo = std::max(0.0, centre - half);
  double hi = std::min(1.0, centre + half);
  if (successes == 0) lo = 0.0;
  if (successes == total) hi = 1.0;
  return {lo, hi};
}

Corpus active_listener_cohort(const Corpus& corpus, double min_span_days, std::size_t min_sessions,
                              std::size_t min_utterances) {
  return filter_min_length(restrict_to_listeners(corpus, filter_active_listeners(corpus, min_span_days, min_sessions)),
                           min_utterances);
}

TrendSeries code_fraction_by_bucket(const Corpus& corpus, const LabelMap& labels,
                                    const std::map<std::string, Instant>* join_times) {
  std::map<std::string, Instant> own;
  if (!join_times) {
    own = listener_join_times(corpus);
    join_times = &own;
  }
  TrendSeries out;
  std::vector<kernels::BucketObservation> obs;
  obs.reserve(corpus.utterance_count());
  std::set<std::string> listeners;
  std::size_t missing = 0;
  for (const auto& c : corpus.conversations()) {
    auto joined = join_times->find(c.listener_id);
    if (joined == join_times->end())
      throw DataError("unknown_listener", fmt::format("no join time for listener '{}'", c.listener_id));
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      auto it = labels.find(u.utterance_id);
      if (it == labels.end()) {
        ++missing;
        continue;
      }
      listeners.insert(c.listener_id);
      obs.push_back({tenure_bucket(joined->second, u.timestamp), it->second});
    }
  }
  if (missing)
    throw DataError("missing_labels", fmt::format("{} listener utterances have no labels", missing));
  out.listeners = listeners.size();

  const auto counts = kernels::count_by_bucket_parallel(obs);
  for (std::size_t ci = 0; ci < kNumCodes; ++ci)
    for (std::size_t b = 0; b < kNumBuckets; ++b) {
      auto& cell = out.cells[ci][b];
      cell.utterance_count = counts.utterances[b];
      cell.code_count = counts.codes[b][ci];
      if (cell.utterance_count) {
        cell.fraction = static_cast<double>(cell.code_count) / static_cast<double>(cell.utterance_count);
        std::tie(cell.ci_low, cell.ci_high) = proportion_ci(cell.code_count, cell.utterance_count);
      }
    }
  return out;
}

std::string_view level_name(CorrLevel level) noexcept {
  switch (level) {
    case CorrLevel::Utterance: return "utterance";
    case CorrLevel::Conversation: return "conversation";
    case CorrLevel::Listener: return "listener";
  }
  return "?";
}

std::vector<std::string> CorrMatrix::undefined_variables() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (!at(i, i)) out.push_back(variables[i]);
  return out;
}

namespace {

CorrMatrix finish(CorrLevel level, std::vector<std::string> names, const kernels::ColumnData& data) {
  if (data.rows < 2) throw DataError("too_few_rows", "correlation needs at least two observations");
  const auto raw = kernels::pearson_parallel(data);
  CorrMatrix m;
  m.level = level;
  m.variables = std::move(names);
  m.n = data.rows;
  m.r.reserve(raw.size());
  for (double v : raw) m.r.push_back(std::isnan(v) ? std::nullopt : std::optional<double>(v));
  return m;
}

std::vector<std::string> code_names() {
  std::vector<std::string> names;
  for (auto c : kAllCodes) names.emplace_back(code_name(c));
  return names;
}

}  // namespace

CorrMatrix cooccurrence_matrix(std::span<const CodeSet> labels) {
  kernels::ColumnData data(labels.size(), kNumCodes);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t c = 0; c < kNumCodes; ++c) data.at(i, c) = labels[i].contains(kAllCodes[c]) ? 1.0 : 0.0;
  return finish(CorrLevel::Utterance, code_names(), data);
}

CorrMatrix cooccurrence_matrix(const Corpus& corpus, const LabelMap& labels) {
  std::vector<CodeSet> rows;
  for (const auto& c : corpus.conversations())
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      if (auto it = labels.find(u.utterance_id); it != labels.end()) rows.push_back(it->second);
    }
  return cooccurrence_matrix(rows);
}

CorrMatrix conversation_corr(const Corpus& corpus, const LabelMap& labels) {
  const auto& convs = corpus.conversations();
  kernels::ColumnData data(convs.size(), kNumCodes + 1);
  for (std::size_t i = 0; i < convs.size(); ++i) {
    for (const auto& u : convs[i].utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      auto it = labels.find(u.utterance_id);
      if (it == labels.end()) continue;
      for (std::size_t c = 0; c < kNumCodes; ++c)
        if (it->second.contains(kAllCodes[c])) data.at(i, c) += 1.0;
    }
    data.at(i, kNumCodes) = static_cast<double>(convs[i].utterances.size());
  }
  auto names = code_names();
  names.emplace_back("Length");
  return finish(CorrLevel::Conversation, std::move(names), data);
}

CorrMatrix listener_corr(const Corpus& corpus, const LabelMap& labels) {
  std::map<std::string, std::pair<std::size_t, std::array<std::size_t, kNumCodes>>> per;
  for (const auto& c : corpus.conversations())
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      auto it = labels.find(u.utterance_id);
      if (it == labels.end()) continue;
      auto& [total, counts] = per[c.listener_id];
      ++total;
      for (std::size_t k = 0; k < kNumCodes; ++k) counts[k] += it->second.contains(kAllCodes[k]);
    }
  if (per.size() < 2) throw DataError("too_few_listeners", "listener-level correlation needs at least two listeners");
  kernels::ColumnData data(per.size(), kNumCodes);
  std::size_t row = 0;
  for (const auto& [id, tc] : per) {
    for (std::size_t k = 0; k < kNumCodes; ++k)
      data.at(row, k) = static_cast<double>(tc.second[k]) / static_cast<double>(tc.first);
    ++row;
  }
  return finish(CorrLevel::Listener, code_names(), data);
}

namespace {

std::string num(const std::optional<double>& v, int digits = 6) {
  return v ? fmt::format("{:.{}f}", *v, digits) : std::string("NA");
}

}  // namespace

std::string trend_tsv(const TrendSeries& series) {
  std::string out = "code\tbucket\tutterances\tcount\tfraction\tci_low\tci_high\n";
  for (auto c : kAllCodes)
    for (auto b : kAllBuckets) {
      const auto& cell = series.at(c, b);
      const bool defined = cell.fraction.has_value();
      out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", code_name(c), bucket_name(b), cell.utterance_count,
                         cell.code_count, num(cell.fraction),
                         defined ? fmt::format("{:.6f}", cell.ci_low) : "NA",
                         defined ? fmt::format("{:.6f}", cell.ci_high) : "NA");
    }
  return out;
}

std::string trend_table(const TrendSeries& series) {
  std::string out = fmt::format("Listener code usage by tenure ({} listeners, 95% Wilson intervals)\n", series.listeners);
  out += fmt::format("{:<24}", "MI Code");
  for (auto b : kAllBuckets) out += fmt::format(" {:>24}", bucket_name(b));
  out += "\n";
  out += fmt::format("{:<24}", "utterances");
  for (auto b : kAllBuckets) out += fmt::format(" {:>24}", series.at(MiCode::Other, b).utterance_count);
  out += "\n";
  for (auto c : kAllCodes) {
    out += fmt::format("{:<24}", display_name(c));
    for (auto b : kAllBuckets) {
      const auto& cell = series.at(c, b);
      out += fmt::format(" {:>24}", cell.fraction ? fmt::format("{:.4f} [{:.4f},{:.4f}]", *cell.fraction,
                                                                cell.ci_low, cell.ci_high)
                                                  : std::string("undefined"));
    }
    out += "\n";
  }
  return out;
}

std::string trend_svg(const TrendSeries& series, std::span<const MiCode> codes) {
  constexpr int kPanelW = 220, kPanelH = 160, kCols = 4, kPad = 30;
  const int rows = static_cast<int>((codes.size() + kCols - 1) / kCols);
  const int width = kCols * kPanelW, height = rows * kPanelH;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"10\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  for (std::size_t p = 0; p < codes.size(); ++p) {
    const MiCode code = codes[p];
    const int x0 = static_cast<int>(p % kCols) * kPanelW, y0 = static_cast<int>(p / kCols) * kPanelH;
    const double plot_w = kPanelW - 2 * kPad, plot_h = kPanelH - 2 * kPad;
    double top = 0.0;
    for (auto b : kAllBuckets) top = std::max(top, series.at(code, b).ci_high);
    top = top > 0 ? top * 1.1 : 1.0;
    auto px = [&](std::size_t b) { return x0 + kPad + plot_w * (static_cast<double>(b) + 0.5) / kNumBuckets; };
    auto py = [&](double v) { return y0 + kPad + plot_h * (1.0 - v / top); };

    svg += fmt::format("<g>\n<text x=\"{}\" y=\"{}\" font-weight=\"bold\">{}</text>\n", x0 + kPad, y0 + 14,
                       display_name(code));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n",
                       x0 + kPad, y0 + kPad, plot_w, plot_h);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3f}</text>\n", x0 + kPad - 2, y0 + kPad + 4,
                       top);
    std::string path;
    for (std::size_t b = 0; b < kNumBuckets; ++b) {
      const auto& cell = series.at(code, kAllBuckets[b]);
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(b),
                         y0 + kPanelH - kPad + 12, bucket_name(kAllBuckets[b]));
      if (!cell.fraction) continue;
      svg += fmt::format("<line x1=\"{0:.1f}\" x2=\"{0:.1f}\" y1=\"{1:.1f}\" y2=\"{2:.1f}\" stroke=\"#6a9fd4\"/>\n",
                         px(b), py(cell.ci_low), py(cell.ci_high));
      svg += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"2.5\" fill=\"#1f4e79\"/>\n", px(b),
                         py(*cell.fraction));
      path += fmt::format("{}{:.1f},{:.1f}", path.empty() ? "M" : " L", px(b), py(*cell.fraction));
    }
    if (!path.empty()) svg += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"#1f4e79\"/>\n", path);
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string corr_tsv(const CorrMatrix& m) {
  std::string out = fmt::format("# level\t{}\n# n\t{}\n", level_name(m.level), m.n);
  for (const auto& v : m.undefined_variables()) out += fmt::format("# undefined\t{}\n", v);
  out += "variable";
  for (const auto& v : m.variables) out += "\t" + v;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.variables[i];
    for (std::size_t j = 0; j < m.size(); ++j) out += "\t" + num(m.at(i, j), 12);
    out += "\n";
  }
  return out;
}

}  // namespace micode
