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

#include "micode/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "micode/error.hpp"
#include "micode/random.hpp"
#include "micode/topwords.hpp"

namespace micode {

namespace {

using json = nlohmann::json;

constexpr std::size_t kSlots = 3;
constexpr std::int64_t kTurnSeconds = 45;

// Annotated utterance counts per code in canonical order, and the number of
// distinct annotated utterances.
constexpr std::array<double, kNumCodes> kPaperCounts = {304, 1697, 1493, 346, 1956, 2507, 1918, 271, 224,
                                                        250, 120,  1027, 1605, 1260, 340, 963, 1299};
constexpr double kPaperUtterances = 14797.0;

void infeasible(const std::string& what) { throw DataError("infeasible_spec", what); }

double max_probability(const GeneratorSpec& s, std::size_t c) {
  return s.code_probability[c] + std::max(0.0, s.drift_per_year[c] * s.drift_horizon_days / 365.0);
}

double probability_at(const GeneratorSpec& s, std::size_t c, double tenure_days) {
  const double t = std::clamp(tenure_days, 0.0, s.drift_horizon_days);
  return std::clamp(s.code_probability[c] + s.drift_per_year[c] * t / 365.0, 0.0, 1.0);
}

std::string pad(std::size_t v, int width) { return fmt::format("{:0{}d}", v, width); }

int width_for(std::size_t n) { return std::max(4, static_cast<int>(std::to_string(n).size())); }

}  // namespace

std::array<double, kNumCodes> default_code_probabilities() {
  std::array<double, kNumCodes> p{};
  for (std::size_t c = 0; c < kNumCodes; ++c) p[c] = kPaperCounts[c] / kPaperUtterances;
  return p;
}

std::array<std::vector<std::string>, kNumCodes> default_lexicons() {
  std::array<std::vector<std::string>, kNumCodes> lex;
  auto set = [&](MiCode c, std::vector<std::string> words) { lex[index_of(c)] = std::move(words); };
  set(MiCode::GivingInformation, {"research", "studies", "information", "resources", "article", "facts"});
  set(MiCode::Reflection, {"sounds", "hear", "seems", "saying", "overwhelmed", "frustrated"});
  set(MiCode::Support, {"sorry", "understandable", "difficult", "hugs", "tough", "rough"});
  set(MiCode::Affirm, {"brave", "proud", "strength", "courage", "amazing", "impressive"});
  set(MiCode::ClosedQuestion, {"ever", "anyone", "really", "sure", "tried", "correct"});
  set(MiCode::OpenQuestion, {"how", "describe", "tell", "explain", "elaborate", "wonder"});
  set(MiCode::Persuade, {"suggest", "recommend", "consider", "exercise", "journaling", "therapist"});
  set(MiCode::SeekingCollaboration, {"together", "permission", "alright", "mind", "ready", "plan"});
  set(MiCode::Inappropriate, {"stupid", "idiot", "damn", "shut", "crap", "dumb"});
  set(MiCode::Direct, {"must", "stop", "immediately", "quit", "call", "leave"});
  set(MiCode::EmphasizingAutonomy, {"choice", "decide", "decision", "control", "options", "freedom"});
  set(MiCode::Grounding, {"breathe", "calm", "relax", "notice", "senses", "present"});
  set(MiCode::PersonalDisclosure, {"personally", "experienced", "struggled", "similar", "happened", "years"});
  set(MiCode::Introduction, {"hello", "good", "morning", "today", "welcome"});
  set(MiCode::Conclusion, {"bye", "goodbye", "care", "night", "later", "wish"});
  set(MiCode::ChitChat, {"weather", "movie", "pizza", "game", "music", "weekend"});
  set(MiCode::Other, {"hmm", "lol", "typo", "oops", "idk", "nvm"});
  return lex;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = [] {
    constexpr std::string_view consonants = "bdfgklmnprstvz";
    constexpr std::string_view vowels = "aeiou";
    const std::size_t syllables = consonants.size() * vowels.size();
    auto syl = [&](std::size_t i) {
      return std::string{consonants[i / vowels.size()], vowels[i % vowels.size()]};
    };
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; out.size() < 1000; ++i) {
      std::string w = syl(i % syllables) + syl((i * 13 + i / syllables) % syllables) + syl((i * 31 + 17) % syllables);
      if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
  }();
  return words;
}

void validate_spec(const GeneratorSpec& s) {
  if (s.n_conversations == 0) infeasible("n_conversations must be positive");
  if (s.n_listeners == 0 || s.n_members == 0) infeasible("need at least one listener and one member");
  if (s.min_listener_utterances == 0 || s.min_listener_utterances > s.max_listener_utterances)
    infeasible("listener utterance range is empty");
  if (s.min_filler > s.max_filler) infeasible("filler range is empty");
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  for (double p : {s.member_turn_probability, s.intro_open_probability, s.rating_probability,
                   s.missing_age_probability})
    if (!unit(p)) infeasible("probabilities must lie in [0,1]");
  if (s.member_age_min > s.member_age_max || s.listener_age_min > s.listener_age_max) infeasible("bad age range");
  if (s.drift_horizon_days <= 0 || s.max_tenure_days <= 0) infeasible("tenure horizons must be positive");
  if (s.style_strength < 0) infeasible("style_strength must be non-negative");

  std::set<std::string> words, stems;
  const auto& filler = filler_words();
  const std::set<std::string> filler_set(filler.begin(), filler.end());
  for (std::size_t c = 0; c < kNumCodes; ++c) {
    const auto name = code_name(kAllCodes[c]);
    if (!unit(s.code_probability[c]) || !unit(s.keyword_probability[c]))
      infeasible(fmt::format("probabilities for {} must lie in [0,1]", name));
    if (!unit(max_probability(s, c)) ||
        s.code_probability[c] + std::min(0.0, s.drift_per_year[c] * s.drift_horizon_days / 365.0) < 0.0)
      infeasible(fmt::format("drift takes {} outside [0,1]", name));
    const bool emits = s.keyword_probability[c] > 0.0 || s.context_codes.contains(kAllCodes[c]);
    const bool active = max_probability(s, c) > 0.0 || kAllCodes[c] == MiCode::Other ||
                        (s.intro_open_probability > 0 &&
                         (kAllCodes[c] == MiCode::Introduction || kAllCodes[c] == MiCode::OpenQuestion));
    if (active && emits && s.lexicon[c].size() < s.keywords_per_code)
      infeasible(fmt::format("lexicon for active code {} has fewer than {} words", name, s.keywords_per_code));
    for (const auto& w : s.lexicon[c]) {
      if (w.empty() || filler_set.count(w)) infeasible(fmt::format("lexicon word '{}' is empty or filler", w));
      if (!words.insert(w).second || !stems.insert(porter_stem(w)).second)
        infeasible(fmt::format("lexicons overlap at '{}'", w));
    }
  }
  (void)slot_assignment(s);
}

std::array<int, kNumCodes> slot_assignment(const GeneratorSpec& s) {
  std::array<std::size_t, kNumCodes> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return max_probability(s, a) > max_probability(s, b); });
  std::array<double, kSlots> load{};
  std::array<int, kNumCodes> slot{};
  for (std::size_t c : order) {
    const auto best = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    if (load[best] + max_probability(s, c) > 1.0 + 1e-12)
      infeasible("code probabilities do not fit three codes per utterance");
    load[best] += max_probability(s, c);
    slot[c] = static_cast<int>(best);
  }
  return slot;
}

double expected_code_probability(const GeneratorSpec& s, MiCode code) {
  const auto slots = slot_assignment(s);
  const double q = s.intro_open_probability;
  const std::size_t c = index_of(code);
  double p = s.code_probability[c];
  if (code == MiCode::Other) {
    std::array<double, kSlots> mass{};
    for (std::size_t k = 0; k < kNumCodes; ++k) mass[static_cast<std::size_t>(slots[k])] += s.code_probability[k];
    double none = 1.0;
    for (double m : mass) none *= 1.0 - m;
    p += none;
  }
  const bool paired = code == MiCode::Introduction || code == MiCode::OpenQuestion;
  return q * (paired ? 1.0 : 0.0) + (1.0 - q) * p;
}

namespace {

struct ListenerInfo {
  double style = 0.0;
  double age = 0.0;
  Instant start;
};

struct ConversationOut {
  Conversation conv;
  std::vector<LabelRecord> labels;
  bool latent = false;
};

std::string join_words(std::vector<std::string_view>& words, Rng& rng) {
  for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);
  std::string out;
  for (auto w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void pick_keywords(const std::vector<std::string>& lexicon, std::size_t n, Rng& rng,
                   std::vector<std::string_view>& out) {
  std::vector<std::size_t> idx(lexicon.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < n && i < idx.size(); ++i) {
    std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    out.push_back(lexicon[idx[i]]);
  }
}

void add_filler(const GeneratorSpec& s, Rng& rng, std::vector<std::string_view>& out) {
  const auto& filler = filler_words();
  const auto n = static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(s.min_filler), static_cast<std::int64_t>(s.max_filler)));
  for (std::size_t i = 0; i < n; ++i) out.push_back(filler[rng.below(filler.size())]);
}

CodeSet sample_codes(const GeneratorSpec& s, const std::array<int, kNumCodes>& slots, double tenure_days,
                     double style, Rng& rng) {
  CodeSet codes;
  if (s.intro_open_probability > 0 && rng.bernoulli(s.intro_open_probability)) {
    codes.insert(MiCode::Introduction);
    codes.insert(MiCode::OpenQuestion);
    return codes;
  }
  std::array<double, kNumCodes> p{};
  std::array<double, kSlots> mass{};
  for (std::size_t c = 0; c < kNumCodes; ++c) {
    p[c] = probability_at(s, c, tenure_days);
    if (s.style_codes.contains(kAllCodes[c])) p[c] *= std::max(0.0, 1.0 + s.style_strength * style);
    mass[static_cast<std::size_t>(slots[c])] += p[c];
  }
  for (std::size_t k = 0; k < kSlots; ++k) {
    const double scale = mass[k] > 1.0 ? 1.0 / mass[k] : 1.0;
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t c = 0; c < kNumCodes; ++c) {
      if (static_cast<std::size_t>(slots[c]) != k || p[c] <= 0.0) continue;
      cum += p[c] * scale;
      if (u < cum) {
        codes.insert(kAllCodes[c]);
        break;
      }
    }
  }
  if (codes.empty()) codes.insert(MiCode::Other);
  return codes;
}

double tenure_offset(const GeneratorSpec& s, Rng& rng) {
  if (s.tenure_sampling == TenureSampling::Uniform) return rng.uniform() * s.max_tenure_days;
  constexpr std::array<double, 5> edges = {0.0, 30.0, 180.0, 365.0, 0.0};
  const auto b = rng.below(4);
  const double lo = edges[b];
  const double hi = b == 3 ? std::max(s.max_tenure_days, 366.0) : edges[b + 1];
  return lo + rng.uniform() * (hi - lo);
}

}  // namespace

GeneratedCorpus generate_corpus(const GeneratorSpec& s) {
  validate_spec(s);
  const auto slots = slot_assignment(s);

  std::vector<ListenerInfo> listeners(s.n_listeners);
  for (std::size_t l = 0; l < s.n_listeners; ++l) {
    Rng rng(derive_seed(s.seed, "listener", l));
    listeners[l].style = rng.normal();
    listeners[l].age = static_cast<double>(rng.between(static_cast<std::int64_t>(s.listener_age_min),
                                                       static_cast<std::int64_t>(s.listener_age_max)));
    listeners[l].start = Instant{s.epoch.seconds + static_cast<std::int64_t>(l) * 3600};
  }
  std::vector<double> member_ages(s.n_members);
  for (std::size_t m = 0; m < s.n_members; ++m) {
    Rng rng(derive_seed(s.seed, "member", m));
    member_ages[m] = static_cast<double>(
        rng.between(static_cast<std::int64_t>(s.member_age_min), static_cast<std::int64_t>(s.member_age_max)));
  }

  const int cw = width_for(s.n_conversations), lw = width_for(s.n_listeners), mw = width_for(s.n_members);
  const LabelSource source{LabelSource::Kind::Human, std::string(kSimgenAnnotator)};
  std::vector<ConversationOut> outs(s.n_conversations);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < s.n_conversations; ++i) {
    Rng rng(derive_seed(s.seed, "conversation", i));
    const std::size_t l = i % s.n_listeners;
    const std::size_t m = rng.below(s.n_members);
    const double offset_days = i < s.n_listeners ? 0.0 : tenure_offset(s, rng);
    const auto start = Instant{listeners[l].start.seconds + static_cast<std::int64_t>(std::llround(offset_days * 86400.0))};

    ConversationOut& out = outs[i];
    Conversation& conv = out.conv;
    conv.conversation_id = "c" + pad(i, cw);
    conv.listener_id = "L" + pad(l, lw);
    conv.member_id = "M" + pad(m, mw);

    // Text comes from its own stream so labels and ratings do not depend on emit_text.
    Rng text_rng(derive_seed(s.seed, "text", i));
    struct Turn {
      SpeakerRole role;
      std::vector<std::string_view> body;  // shuffled
      std::vector<std::string_view> tail;  // appended in order
      CodeSet codes;
    };
    std::vector<Turn> turns;
    auto new_turn = [&](SpeakerRole r) {
      turns.push_back(Turn{r, {}, {}, {}});
      if (s.emit_text) add_filler(s, text_rng, turns.back().body);
    };

    new_turn(SpeakerRole::Member);
    const auto n_listener = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(s.min_listener_utterances),
                                                                 static_cast<std::int64_t>(s.max_listener_utterances)));
    std::array<int, kNumCodes> counts{};
    for (std::size_t j = 0; j < n_listener; ++j) {
      const CodeSet codes = sample_codes(s, slots, offset_days, listeners[l].style, rng);
      const auto code_list = codes.to_vector();
      const bool needs_context =
          std::any_of(code_list.begin(), code_list.end(), [&](MiCode c) { return s.context_codes.contains(c); });
      const bool member_turn = rng.bernoulli(s.member_turn_probability);
      if (j > 0 && (member_turn || needs_context)) new_turn(SpeakerRole::Member);
      if (needs_context && s.emit_text)
        for (auto c : code_list)
          if (s.context_codes.contains(c))
            pick_keywords(s.lexicon[index_of(c)], s.keywords_per_code, text_rng, turns.back().tail);
      new_turn(SpeakerRole::Listener);
      turns.back().codes = codes;
      for (auto c : code_list) {
        const std::size_t ci = index_of(c);
        ++counts[ci];
        if (!s.emit_text || s.context_codes.contains(c) || !text_rng.bernoulli(s.keyword_probability[ci])) continue;
        pick_keywords(s.lexicon[ci], s.keywords_per_code, text_rng, turns.back().body);
      }
    }

    conv.utterances.reserve(turns.size());
    for (std::size_t u = 0; u < turns.size(); ++u) {
      auto& t = turns[u];
      Utterance utt;
      utt.utterance_id = conv.conversation_id + "-u" + pad(u, 4);
      utt.conversation_id = conv.conversation_id;
      utt.index = u;
      utt.speaker = t.role;
      utt.timestamp = Instant{start.seconds + static_cast<std::int64_t>(u) * kTurnSeconds};
      if (s.emit_text) {
        utt.text = join_words(t.body, text_rng);
        for (auto w : t.tail) {
          if (!utt.text.empty()) utt.text += ' ';
          utt.text += w;
        }
        if (utt.text.empty()) utt.text = filler_words()[text_rng.below(filler_words().size())];
      } else {
        utt.text = ".";
      }
      if (t.role == SpeakerRole::Listener)
        out.labels.push_back(LabelRecord{utt.utterance_id, source, t.codes, Confidences{}, utt.timestamp});
      conv.utterances.push_back(std::move(utt));
    }

    double logit = s.intercept + s.beta_member_age * member_ages[m] + s.beta_listener_age * listeners[l].age;
    for (std::size_t c = 0; c < kNumCodes; ++c)
      if (kAllCodes[c] != MiCode::Other) logit += s.beta[c] * counts[c];
    out.latent = rng.bernoulli(1.0 / (1.0 + std::exp(-logit)));
    const bool rated = rng.bernoulli(s.rating_probability);
    const int rating = out.latent ? static_cast<int>(rng.between(4, 5)) : static_cast<int>(rng.between(1, 3));
    if (rated) conv.rating = rating;
    conv.listener_age = listeners[l].age;
    conv.member_age = member_ages[m];
    if (rng.bernoulli(s.missing_age_probability)) conv.member_age.reset();
  }

  GeneratedCorpus g;
  g.spec = s;
  std::vector<Conversation> convs;
  convs.reserve(outs.size());
  g.latent_satisfied.reserve(outs.size());
  for (auto& o : outs) {
    g.latent_satisfied.push_back(o.latent);
    for (auto& r : o.labels) g.labels.push_back(std::move(r));
    convs.push_back(std::move(o.conv));
  }
  g.corpus = Corpus(std::move(convs));
  for (const auto& l : listeners) g.listener_style.push_back(l.style);
  return g;
}

namespace {

GeneratorSpec base_spec(std::uint64_t seed) {
  GeneratorSpec s;
  s.seed = seed;
  s.code_probability = default_code_probabilities();
  s.lexicon = default_lexicons();
  s.keyword_probability.fill(1.0);
  return s;
}

void magnified_betas(GeneratorSpec& s) {
  s.beta[index_of(MiCode::Reflection)] = 0.3;
  s.beta[index_of(MiCode::Affirm)] = 0.3;
  s.beta[index_of(MiCode::Persuade)] = 0.15;
  s.beta[index_of(MiCode::Inappropriate)] = -0.3;
  s.beta_member_age = -0.01;
  s.beta_listener_age = -0.01;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"default", "separable", "context", "recovery", "observed", "drift", "nodrift"};
}

GeneratorSpec preset(std::string_view name, std::uint64_t seed) {
  GeneratorSpec s = base_spec(seed);
  if (name == "default") {
    magnified_betas(s);
    s.intro_open_probability = 0.03;
    s.style_codes.insert(MiCode::Reflection);
    s.style_codes.insert(MiCode::Affirm);
    s.style_strength = 0.4;
    s.rating_probability = 0.9;
    s.missing_age_probability = 0.02;
  } else if (name == "separable") {
    s.n_conversations = 400;
    s.n_listeners = 20;
    s.n_members = 200;
    s.code_probability.fill(0.1);
  } else if (name == "context") {
    s.n_conversations = 400;
    s.n_listeners = 20;
    s.n_members = 200;
    s.code_probability.fill(0.06);
    s.code_probability[index_of(MiCode::Reflection)] = 0.2;
    s.code_probability[index_of(MiCode::Other)] = 0.15;
    s.keyword_probability[index_of(MiCode::Other)] = 0.0;
    s.context_codes.insert(MiCode::Reflection);
  } else if (name == "recovery") {
    s.n_conversations = 20000;
    s.n_listeners = 200;
    s.n_members = 4000;
    s.code_probability.fill(0.15);
    magnified_betas(s);
    s.intercept = -0.5;
  } else if (name == "observed") {
    s.n_conversations = 100000;
    s.n_listeners = 1000;
    s.n_members = 20000;
    const std::array<std::pair<MiCode, double>, 16> betas = {{
        {MiCode::Affirm, 0.036},      {MiCode::EmphasizingAutonomy, 0.078}, {MiCode::OpenQuestion, 0.0},
        {MiCode::ClosedQuestion, 0.011}, {MiCode::Persuade, 0.018},        {MiCode::Reflection, 0.035},
        {MiCode::SeekingCollaboration, 0.0}, {MiCode::Direct, 0.019},      {MiCode::Inappropriate, -0.086},
        {MiCode::Grounding, 0.008},   {MiCode::GivingInformation, -0.025}, {MiCode::Support, 0.013},
        {MiCode::PersonalDisclosure, 0.001}, {MiCode::Introduction, 0.0},  {MiCode::Conclusion, 0.014},
        {MiCode::ChitChat, -0.004},
    }};
    for (auto [c, b] : betas) s.beta[index_of(c)] = b;
    s.beta_member_age = -0.007;
    s.beta_listener_age = -0.003;
    s.intercept = 0.5;
  } else if (name == "drift" || name == "nodrift") {
    s.n_listeners = 4;
    s.n_conversations = 4 * 500;
    s.n_members = 400;
    s.min_listener_utterances = 50;
    s.max_listener_utterances = 60;
    s.member_turn_probability = 0.5;
    s.tenure_sampling = TenureSampling::BucketBalanced;
    s.max_tenure_days = 730.0;
    s.drift_horizon_days = 730.0;
    if (name == "drift") {
      s.code_probability[index_of(MiCode::Affirm)] = 0.05;
      s.drift_per_year[index_of(MiCode::Affirm)] = 0.05;
    } else {
      s.code_probability[index_of(MiCode::Affirm)] = 0.10;
    }
  } else {
    throw UsageError("unknown_preset", fmt::format("unknown simgen preset '{}'", name));
  }
  return s;
}

std::string planted_json(const GeneratorSpec& s) {
  const auto slots = slot_assignment(s);
  json codes = json::object();
  for (std::size_t c = 0; c < kNumCodes; ++c) {
    const MiCode code = kAllCodes[c];
    codes[std::string(code_name(code))] = {
        {"probability", s.code_probability[c]},
        {"expected_frequency", expected_code_probability(s, code)},
        {"keyword_probability", s.keyword_probability[c]},
        {"lexicon", s.lexicon[c]},
        {"beta", code == MiCode::Other ? 0.0 : s.beta[c]},
        {"drift_per_year", s.drift_per_year[c]},
        {"slot", slots[c]},
        {"context_dependent", s.context_codes.contains(code)},
        {"style", s.style_codes.contains(code)},
    };
  }
  json j = {
      {"seed", s.seed},
      {"n_conversations", s.n_conversations},
      {"n_listeners", s.n_listeners},
      {"n_members", s.n_members},
      {"listener_utterances", {s.min_listener_utterances, s.max_listener_utterances}},
      {"member_turn_probability", s.member_turn_probability},
      {"filler", {s.min_filler, s.max_filler}},
      {"keywords_per_code", s.keywords_per_code},
      {"intro_open_probability", s.intro_open_probability},
      {"intercept", s.intercept},
      {"beta_member_age", s.beta_member_age},
      {"beta_listener_age", s.beta_listener_age},
      {"beta_member_past_average_rating", 0.0},
      {"rating_probability", s.rating_probability},
      {"missing_age_probability", s.missing_age_probability},
      {"member_age", {s.member_age_min, s.member_age_max}},
      {"listener_age", {s.listener_age_min, s.listener_age_max}},
      {"drift_horizon_days", s.drift_horizon_days},
      {"max_tenure_days", s.max_tenure_days},
      {"tenure_sampling", s.tenure_sampling == TenureSampling::Uniform ? "uniform" : "bucket_balanced"},
      {"style_strength", s.style_strength},
      {"epoch", format_iso8601(s.epoch)},
      {"emit_text", s.emit_text},
      {"codes", codes},
  };
  return j.dump(2) + "\n";
}

void write_generated(const GeneratedCorpus& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus(dir / "corpus.jsonl", g.corpus);
  write_label_file(dir / "labels.jsonl", g.labels);
  std::ofstream out(dir / "planted.json", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("io_error", fmt::format("cannot write {}", (dir / "planted.json").string()));
  out << planted_json(g.spec);
  if (!out) throw DataError("io_error", "write failed for planted.json");
}

}  // namespace micode
