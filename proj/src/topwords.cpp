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

#include "micode/topwords.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "micode/error.hpp"
#include "micode/text.hpp"

namespace micode {

namespace {

class Porter {
 public:
  explicit Porter(std::string w) : b_(std::move(w)), k_(static_cast<int>(b_.size()) - 1) {}

  std::string run() {
    if (k_ <= 1) return b_;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return b_.substr(0, static_cast<std::size_t>(k_ + 1));
  }

 private:
  std::string b_;
  int k_;
  int j_ = 0;

  bool cons(int i) const {
    switch (b_[static_cast<std::size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !cons(i - 1);
      default: return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int m() const {
    int n = 0, i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool doublec(int j) const { return j >= 1 && b_[static_cast<std::size_t>(j)] == b_[static_cast<std::size_t>(j - 1)] && cons(j); }

  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char ch = b_[static_cast<std::size_t>(i)];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    const int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (b_.compare(static_cast<std::size_t>(k_ - len + 1), s.size(), s) != 0) return false;
    j_ = k_ - len;
    return true;
  }

  void setto(std::string_view s) {
    b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
    k_ = j_ + static_cast<int>(s.size());
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }

  void r(std::string_view s) {
    if (m() > 0) setto(s);
  }

  void step1ab() {
    if (b_[static_cast<std::size_t>(k_)] == 's') {
      if (ends("sses")) k_ -= 2;
      else if (ends("ies")) setto("i");
      else if (k_ >= 1 && b_[static_cast<std::size_t>(k_ - 1)] != 's') --k_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
    }
    if (ends("eed")) {
      if (m() > 0) --k_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
      if (ends("at")) setto("ate");
      else if (ends("bl")) setto("ble");
      else if (ends("iz")) setto("ize");
      else if (doublec(k_)) {
        const char ch = b_[static_cast<std::size_t>(k_)];
        if (ch != 'l' && ch != 's' && ch != 'z') {
          --k_;
          b_.resize(static_cast<std::size_t>(k_ + 1));
        }
      } else {
        j_ = k_;
        if (m() == 1 && cvc(k_)) {
          b_ += 'e';
          ++k_;
        }
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
  }

  void step2() {
    if (k_ < 1) return;
    switch (b_[static_cast<std::size_t>(k_ - 1)]) {
      case 'a':
        if (ends("ational")) r("ate");
        else if (ends("tional")) r("tion");
        break;
      case 'c':
        if (ends("enci")) r("ence");
        else if (ends("anci")) r("ance");
        break;
      case 'e':
        if (ends("izer")) r("ize");
        break;
      case 'l':
        if (ends("bli")) r("ble");
        else if (ends("alli")) r("al");
        else if (ends("entli")) r("ent");
        else if (ends("eli")) r("e");
        else if (ends("ousli")) r("ous");
        break;
      case 'o':
        if (ends("ization")) r("ize");
        else if (ends("ation")) r("ate");
        else if (ends("ator")) r("ate");
        break;
      case 's':
        if (ends("alism")) r("al");
        else if (ends("iveness")) r("ive");
        else if (ends("fulness")) r("ful");
        else if (ends("ousness")) r("ous");
        break;
      case 't':
        if (ends("aliti")) r("al");
        else if (ends("iviti")) r("ive");
        else if (ends("biliti")) r("ble");
        break;
      case 'g':
        if (ends("logi")) r("log");
        break;
      default: break;
    }
  }

  void step3() {
    switch (b_[static_cast<std::size_t>(k_)]) {
      case 'e':
        if (ends("icate")) r("ic");
        else if (ends("ative")) r("");
        else if (ends("alize")) r("al");
        break;
      case 'i':
        if (ends("iciti")) r("ic");
        break;
      case 'l':
        if (ends("ical")) r("ic");
        else if (ends("ful")) r("");
        break;
      case 's':
        if (ends("ness")) r("");
        break;
      default: break;
    }
  }

  void step4() {
    if (k_ < 1) return;
    switch (b_[static_cast<std::size_t>(k_ - 1)]) {
      case 'a': if (ends("al")) break; return;
      case 'c': if (ends("ance") || ends("ence")) break; return;
      case 'e': if (ends("er")) break; return;
      case 'i': if (ends("ic")) break; return;
      case 'l': if (ends("able") || ends("ible")) break; return;
      case 'n':
        if (ends("ant") || ends("ement") || ends("ment") || ends("ent")) break;
        return;
      case 'o':
        if (ends("ion") && j_ >= 0 && (b_[static_cast<std::size_t>(j_)] == 's' || b_[static_cast<std::size_t>(j_)] == 't')) break;
        if (ends("ou")) break;
        return;
      case 's': if (ends("ism")) break; return;
      case 't': if (ends("ate") || ends("iti")) break; return;
      case 'u': if (ends("ous")) break; return;
      case 'v': if (ends("ive")) break; return;
      case 'z': if (ends("ize")) break; return;
      default: return;
    }
    if (m() > 1) {
      k_ = j_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
    }
  }

  void step5() {
    j_ = k_;
    if (b_[static_cast<std::size_t>(k_)] == 'e') {
      const int a = m();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (b_[static_cast<std::size_t>(k_)] == 'l' && doublec(k_)) {
      j_ = k_;
      if (m() > 1) --k_;
    }
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }
};

const std::vector<std::string_view> kStopwords = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",     "am",      "an",      "and",
    "any",     "are",     "aren't", "as",      "at",      "be",      "because", "been",    "before",  "being",
    "below",   "between", "both",   "but",     "by",      "can",     "can't",   "cannot",  "could",   "couldn't",
    "did",     "didn't",  "do",     "does",    "doesn't", "doing",   "don't",   "down",    "during",  "each",
    "few",     "for",     "from",   "further", "had",     "hadn't",  "has",     "hasn't",  "have",    "haven't",
    "having",  "he",      "her",    "here",    "hers",    "herself", "him",     "himself", "his",     "i",
    "i'd",     "i'll",    "i'm",    "i've",    "if",      "in",      "into",    "is",      "isn't",   "it",
    "it's",    "its",     "itself", "just",    "let's",   "me",      "more",    "most",    "my",      "myself",
    "no",      "nor",     "not",    "now",     "of",      "off",     "on",      "once",    "only",    "or",
    "other",   "ought",   "our",    "ours",    "out",     "over",    "own",     "same",    "she",     "should",
    "so",      "some",    "such",   "than",    "that",    "that's",  "the",     "their",   "theirs",  "them",
    "then",    "there",   "these",  "they",    "they're", "this",    "those",   "through", "to",      "too",
    "under",   "until",   "up",     "very",    "was",     "wasn't",  "we",      "we're",   "were",    "weren't",
    "what",    "when",    "where",  "which",   "while",   "who",     "whom",    "why",     "will",    "with",
    "won't",   "would",   "you",    "you'd",   "you'll",  "you're",  "you've",  "your",    "yours",   "yourself",
    "also",    "yes",     "ok",     "okay",    "oh",      "um",      "uh",      "yeah",    "s",       "t",
};

bool ascii_alpha_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

struct Doc {
  std::unordered_map<std::string, std::size_t> stem_counts;
  std::unordered_map<std::string, std::map<std::string, std::size_t>> surface;
  std::size_t tokens = 0;
};

std::array<Doc, kNumCodes> build_docs(const Corpus& corpus, const LabelMap& labels) {
  std::array<Doc, kNumCodes> docs;
  for (const auto& c : corpus.conversations())
    for (const auto& u : c.utterances) {
      if (u.speaker != SpeakerRole::Listener) continue;
      auto it = labels.find(u.utterance_id);
      if (it == labels.end() || it->second.empty()) continue;
      std::vector<std::pair<std::string, std::string>> kept;
      for (auto& tok : word_tokens(to_lower(u.text))) {
        if (tok == kContextMarker || is_stopword(tok)) continue;
        if (std::none_of(tok.begin(), tok.end(), [](char ch) { return std::isalpha(static_cast<unsigned char>(ch)); }))
          continue;
        kept.emplace_back(porter_stem(tok), tok);
      }
      for (auto code : it->second.to_vector()) {
        auto& d = docs[index_of(code)];
        d.tokens += kept.size();
        for (const auto& [stem, surf] : kept) {
          ++d.stem_counts[stem];
          ++d.surface[stem][surf];
        }
      }
    }
  return docs;
}

std::vector<TopWord> rank(const std::array<Doc, kNumCodes>& docs, const std::unordered_map<std::string, std::size_t>& df,
                          std::size_t code, std::size_t n) {
  const Doc& d = docs[code];
  std::vector<TopWord> all;
  all.reserve(d.stem_counts.size());
  for (const auto& [stem, count] : d.stem_counts) {
    const double tf = static_cast<double>(count) / static_cast<double>(d.tokens);
    const double idf = std::log(1.0 + static_cast<double>(kNumCodes) / (1.0 + static_cast<double>(df.at(stem))));
    const auto& forms = d.surface.at(stem);
    // std::map iterates in order, so the first maximum is the smallest form.
    auto best = std::max_element(forms.begin(), forms.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    all.push_back({best->first, stem, tf * idf});
  }
  std::sort(all.begin(), all.end(), [](const TopWord& a, const TopWord& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.stem < b.stem;
  });
  if (all.size() > n) all.resize(n);
  return all;
}

std::unordered_map<std::string, std::size_t> doc_freq(const std::array<Doc, kNumCodes>& docs) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& d : docs)
    for (const auto& [stem, count] : d.stem_counts) ++df[stem];
  return df;
}

}  // namespace

std::string porter_stem(std::string_view word) {
  if (!ascii_alpha_word(word)) return std::string(word);
  return Porter(std::string(word)).run();
}

const std::vector<std::string_view>& stopwords() { return kStopwords; }

bool is_stopword(std::string_view w) {
  static const auto sorted = [] {
    auto v = kStopwords;
    std::sort(v.begin(), v.end());
    return v;
  }();
  return std::binary_search(sorted.begin(), sorted.end(), w);
}

TopWordsReport top_words(const Corpus& corpus, const LabelMap& labels, std::size_t n) {
  const auto docs = build_docs(corpus, labels);
  const auto df = doc_freq(docs);
  TopWordsReport report;
  report.n = n;
  for (std::size_t c = 0; c < kNumCodes; ++c) {
    report.document_tokens[c] = docs[c].tokens;
    if (docs[c].tokens) report.per_code[c] = rank(docs, df, c, n);
  }
  return report;
}

std::vector<TopWord> tfidf_top_words(const Corpus& corpus, const LabelMap& labels, MiCode code, std::size_t n) {
  const auto docs = build_docs(corpus, labels);
  if (docs[index_of(code)].tokens == 0)
    throw DataError("empty_document", fmt::format("no content tokens for code {}", code_name(code)));
  return rank(docs, doc_freq(docs), index_of(code), n);
}

std::string topwords_table(const TopWordsReport& report) {
  std::string out = fmt::format("Most relevant words per MI code (top {}, TF-IDF)\n", report.n);
  for (auto c : kAllCodes) {
    const auto& words = report.per_code[index_of(c)];
    std::string joined;
    for (const auto& w : words) joined += (joined.empty() ? "" : ", ") + w.word;
    out += fmt::format("{:<24} {}\n", display_name(c), words.empty() ? std::string("(no labeled utterances)") : joined);
  }
  return out;
}

std::string topwords_tsv(const TopWordsReport& report) {
  std::string out = "code\trank\tword\tstem\tscore\n";
  for (auto c : kAllCodes) {
    const auto& words = report.per_code[index_of(c)];
    for (std::size_t i = 0; i < words.size(); ++i)
      out += fmt::format("{}\t{}\t{}\t{}\t{:.10f}\n", code_name(c), i + 1, words[i].word, words[i].stem,
                         words[i].score);
  }
  return out;
}

}  // namespace micode
