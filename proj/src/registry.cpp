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

#include "micode/registry.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "micode/error.hpp"
#include "micode/kernels.hpp"

namespace micode {

using nlohmann::json;

void ModelRegistry::put(MiCode code, std::size_t k, RegistryEntry entry) {
  entries_.insert_or_assign({code, k}, std::move(entry));
}

const RegistryEntry* ModelRegistry::find(MiCode code, std::size_t k) const {
  auto it = entries_.find({code, k});
  return it == entries_.end() ? nullptr : &it->second;
}

bool ModelRegistry::complete_for(std::size_t k) const {
  for (auto c : kAllCodes)
    if (!find(c, k)) return false;
  return true;
}

std::vector<std::size_t> ModelRegistry::context_sizes() const {
  std::set<std::size_t> ks;
  for (const auto& [key, _] : entries_) ks.insert(key.second);
  return {ks.begin(), ks.end()};
}

namespace {

json eval_to_json(const EvalReport& r) {
  return {{"tp", r.tp},       {"fp", r.fp},         {"fn", r.fn},   {"tn", r.tn},
          {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}, {"support", r.support}};
}

EvalReport eval_from_json(MiCode code, std::size_t k, const json& j) {
  return eval_from_counts(code, k, j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(),
                          j.at("fn").get<std::size_t>(), j.at("tn").get<std::size_t>());
}

std::string model_file_name(MiCode code, std::size_t k) { return fmt::format("{}.k{}.model", code_name(code), k); }

}  // namespace

void ModelRegistry::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  json models = json::array();
  for (const auto& [key, entry] : entries_) {
    const auto [code, k] = key;
    json m = {{"code", code_name(code)},
              {"k", k},
              {"model_id", entry.meta.model_id},
              {"trained_at", format_iso8601(entry.meta.trained_at)},
              {"training_set_hash", fmt::format("{:016x}", entry.meta.training_set_hash)}};
    if (entry.meta.eval) m["eval"] = eval_to_json(*entry.meta.eval);
    if (const auto* native = std::get_if<std::shared_ptr<const CodeClassifier>>(&entry.model)) {
      const auto file = model_file_name(code, k);
      (*native)->save(dir / file);
      m["kind"] = "native";
      m["file"] = file;
    } else {
      const auto& ext = std::get<ExternalModelRef>(entry.model);
      m["kind"] = "external";
      m["url"] = ext.base_url;
      m["external_model_id"] = ext.model_id;
      m["timeout_seconds"] = ext.timeout_seconds;
    }
    models.push_back(std::move(m));
  }
  const json doc = {{"format", "micode-registry"}, {"version", 1}, {"models", models}};
  const auto tmp = dir / "registry.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("unwritable_file", fmt::format("cannot write registry in '{}'", dir.string()));
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir / "registry.json");
}

ModelRegistry ModelRegistry::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "registry.json");
  if (!in) throw ModelError("missing_registry", fmt::format("no registry.json in '{}'", dir.string()));
  ModelRegistry reg;
  try {
    const json doc = json::parse(in);
    for (const auto& m : doc.at("models")) {
      const auto code = parse_code(m.at("code").get<std::string>());
      if (!code) throw ModelError("bad_registry", "unknown code in registry");
      const auto k = m.at("k").get<std::size_t>();
      RegistryEntry entry;
      entry.meta.model_id = m.at("model_id").get<std::string>();
      entry.meta.trained_at = parse_iso8601(m.at("trained_at").get<std::string>());
      entry.meta.training_set_hash = std::stoull(m.at("training_set_hash").get<std::string>(), nullptr, 16);
      if (m.contains("eval")) entry.meta.eval = eval_from_json(*code, k, m.at("eval"));
      if (m.at("kind") == "native") {
        auto model = std::make_shared<const CodeClassifier>(
            CodeClassifier::load(dir / m.at("file").get<std::string>()));
        if (model->code() != *code || model->k() != k)
          throw ModelError("bad_registry", fmt::format("model file for {} k={} does not match", code_name(*code), k));
        entry.model = std::move(model);
      } else {
        entry.model = ExternalModelRef{m.at("url").get<std::string>(), m.at("external_model_id").get<std::string>(),
                                       m.value("timeout_seconds", 10.0)};
      }
      reg.put(*code, k, std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ModelError("bad_registry", fmt::format("malformed registry.json: {}", e.what()));
  }
  return reg;
}

std::vector<ExternalScores> external_predict(const ExternalModelRef& endpoint, std::size_t k,
                                             std::span<const ContextualUtterance> batch) {
  json items = json::array();
  for (const auto& cu : batch) items.push_back({{"utterance_id", cu.target.utterance_id}, {"context_text", cu.context_text}});
  const json request = {{"k", k}, {"items", std::move(items)}};

  httplib::Client client(endpoint.base_url);
  const auto secs = static_cast<time_t>(endpoint.timeout_seconds);
  const auto usecs = static_cast<time_t>((endpoint.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post("/predict", request.dump(), "application/json");
  if (!res)
    throw RetriableError("network", fmt::format("external model '{}' unreachable: {}", endpoint.model_id,
                                                httplib::to_string(res.error())));
  if (res->status >= 500)
    throw RetriableError("upstream", fmt::format("external model '{}' returned HTTP {}", endpoint.model_id, res->status));
  if (res->status != 200)
    throw ProtocolError("http_status", fmt::format("external model '{}' returned HTTP {}", endpoint.model_id, res->status));

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception&) {
    throw ProtocolError("bad_json", "external model reply is not JSON");
  }
  const auto it = reply.find("items");
  if (it == reply.end() || !it->is_array() || it->size() != batch.size())
    throw ProtocolError("bad_reply", "external model reply must carry one item per request item");

  std::vector<ExternalScores> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& item = (*it)[i];
    if (!item.is_object() || item.value("utterance_id", std::string{}) != batch[i].target.utterance_id)
      throw ProtocolError("bad_reply", fmt::format("reply item {} does not match request order", i));
    const auto scores = item.find("scores");
    if (scores == item.end() || !scores->is_object()) throw ProtocolError("bad_reply", "reply item without scores");
    for (const auto& [name, value] : scores->items()) {
      const auto code = parse_code(name);
      if (!code) throw ProtocolError("bad_reply", fmt::format("unknown code '{}' in reply", name));
      if (!value.is_number()) throw ProtocolError("bad_reply", "score is not a number");
      const double p = value.get<double>();
      if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p))
        throw ProtocolError("bad_probability", fmt::format("probability {} for {} outside [0,1]", p, name));
      out[i][index_of(*code)] = p;
    }
  }
  return out;
}

std::vector<CodeScores> score_batch(const ModelRegistry& registry, std::span<const ContextualUtterance> batch) {
  std::vector<CodeScores> scores(batch.size());
  if (batch.empty()) return scores;
  const std::size_t k = batch.front().k;
  for (const auto& cu : batch)
    if (cu.k != k) throw ModelError("k_mismatch", "batch mixes context sizes");

  std::vector<const CodeClassifier*> native(kNumCodes, nullptr);
  std::map<std::pair<std::string, std::string>, std::pair<ExternalModelRef, std::vector<MiCode>>> external;
  for (auto c : kAllCodes) {
    const auto* entry = registry.find(c, k);
    if (!entry) throw ModelError("missing_model", fmt::format("no model for {} at k={}", code_name(c), k));
    if (const auto* m = std::get_if<std::shared_ptr<const CodeClassifier>>(&entry->model)) {
      if ((*m)->k() != k) throw ModelError("k_mismatch", "registry entry k mismatch");
      native[index_of(c)] = m->get();
    } else {
      const auto& ref = std::get<ExternalModelRef>(entry->model);
      auto& slot = external[{ref.base_url, ref.model_id}];
      slot.first = ref;
      slot.second.push_back(c);
    }
  }

  bool any_native = false;
  for (auto* m : native) any_native = any_native || m;
  if (any_native) {
    std::vector<std::string> texts;
    texts.reserve(batch.size());
    for (const auto& cu : batch) texts.push_back(cu.context_text);
    const auto features = kernels::featurize_parallel(texts);
    std::vector<double> logits(batch.size());
    for (auto c : kAllCodes) {
      const auto* m = native[index_of(c)];
      if (!m) continue;
      kernels::logits_parallel(*m, features, logits);
      for (std::size_t i = 0; i < batch.size(); ++i) scores[i][index_of(c)] = logistic(logits[i]);
    }
  }
  for (const auto& [key, slot] : external) {
    const auto reply = external_predict(slot.first, k, batch);
    for (std::size_t i = 0; i < batch.size(); ++i)
      for (auto c : slot.second) {
        const auto& p = reply[i][index_of(c)];
        if (!p) throw ProtocolError("missing_score", fmt::format("external model omitted {}", code_name(c)));
        scores[i][index_of(c)] = *p;
      }
  }
  return scores;
}

std::vector<LabelSet> predict_labels_batch(const ModelRegistry& registry, std::span<const ContextualUtterance> batch,
                                           double threshold) {
  const auto scores = score_batch(registry, batch);
  std::vector<LabelSet> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i].confidence = scores[i];
    for (auto c : kAllCodes)
      if (scores[i][index_of(c)] >= threshold) out[i].codes.insert(c);
  }
  return out;
}

LabelSet predict_labels(const ModelRegistry& registry, const ContextualUtterance& cu, double threshold) {
  return predict_labels_batch(registry, std::span<const ContextualUtterance>(&cu, 1), threshold).front();
}

}  // namespace micode
