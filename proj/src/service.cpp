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

#include "micode/service.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "micode/agreement.hpp"
#include "micode/corpus.hpp"
#include "micode/error.hpp"
#include "micode/label_store.hpp"
#include "micode/pipeline.hpp"
#include "micode/registry.hpp"
#include "micode/satisfaction.hpp"
#include "micode/suggest.hpp"
#include "micode/topwords.hpp"
#include "micode/trends.hpp"

namespace micode {

namespace {

using json = nlohmann::json;

ApiResponse reply(int status, const json& body) { return {status, body.dump()}; }

ApiResponse error_reply(int status, std::string_view code, std::string_view message) {
  return reply(status, json{{"error", message}, {"code", code}});
}

int status_for(const DataError& e) {
  const auto& c = e.code();
  if (c == "unknown_utterance" || c == "unknown_conversation") return 404;
  if (c == "missing_annotator" || c == "bad_request") return 400;
  if (c == "missing_labels" || c == "too_few_listeners" || c == "too_few_rows" || c == "single_class" ||
      c == "separation")
    return 409;
  return 422;
}

json alpha_json(const AlphaResult& a) {
  return {{"alpha", a.alpha ? json(*a.alpha) : json(nullptr)},
          {"units", a.units_used},
          {"pairable_values", a.pairable_values}};
}

json eval_json(const EvalReport& e) {
  return {{"precision", e.precision}, {"recall", e.recall}, {"f1", e.f1}, {"support", e.support},
          {"tp", e.tp},               {"fp", e.fp},         {"fn", e.fn}, {"tn", e.tn}};
}

json model_json(MiCode code, std::size_t k, const RegistryEntry& e) {
  json j = {{"code", code_name(code)},
            {"k", k},
            {"model_id", e.meta.model_id},
            {"trained_at", format_iso8601(e.meta.trained_at)},
            {"training_set_hash", fmt::format("{:016x}", e.meta.training_set_hash)},
            {"kind", std::holds_alternative<ExternalModelRef>(e.model) ? "external" : "native"}};
  if (e.meta.eval) j["eval"] = eval_json(*e.meta.eval);
  return j;
}

std::size_t query_size(const ApiRequest& r, const std::string& key, std::size_t fallback, std::size_t max_value) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size() || v < 0) throw std::invalid_argument("negative");
    return std::min(static_cast<std::size_t>(v), max_value);
  } catch (const std::exception&) {
    throw UsageError("bad_query", fmt::format("query parameter '{}' must be a non-negative integer", key));
  }
}

std::string_view speaker_name(SpeakerRole r) { return r == SpeakerRole::Listener ? "listener" : "member"; }

struct Job {
  std::string id;
  std::optional<MiCode> code;
  std::size_t k = 1;
  std::string annotator;
  std::string status = "queued";
  std::string error;
  json models = json::array();
  json skipped = json::array();
  std::size_t examples = 0;
};

struct QueueCache {
  std::uint64_t registry_version = ~0ULL;
  SuggestionQueue queue;
};

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  Corpus corpus;
  LabelStore store;

  mutable std::mutex registry_mu;
  std::shared_ptr<const ModelRegistry> registry;
  std::uint64_t registry_version = 0;

  std::mutex queue_mu;
  QueueCache queue_cache;

  std::mutex jobs_mu;
  std::condition_variable jobs_cv;
  std::map<std::string, Job> jobs;
  std::deque<std::string> pending;
  std::size_t next_job = 1;
  std::size_t active_jobs = 0;
  bool stopping = false;
  std::thread worker;

  explicit Impl(const ServiceConfig& c) : config(c), corpus(parse_corpus(c.corpus_path, false).corpus),
                                          store(LabelStore::open(c.label_log_path)) {
    ModelRegistry reg;
    if (!config.models_dir.empty() && std::filesystem::exists(config.models_dir / "registry.json"))
      reg = ModelRegistry::load(config.models_dir);
    registry = std::make_shared<const ModelRegistry>(std::move(reg));
    worker = std::thread([this] { work(); });
  }

  ~Impl() {
    {
      std::lock_guard lock(jobs_mu);
      stopping = true;
    }
    jobs_cv.notify_all();
    if (worker.joinable()) worker.join();
  }

  std::pair<std::shared_ptr<const ModelRegistry>, std::uint64_t> current_registry() const {
    std::lock_guard lock(registry_mu);
    return {registry, registry_version};
  }

  // Human labels take precedence; listener utterances still missing are
  // filled with model predictions when a complete model set exists.
  LabelMap analysis_labels() {
    auto labels = resolve_labels(store.snapshot()->current_records());
    const auto [reg, version] = current_registry();
    std::vector<ContextualUtterance> missing;
    for (const auto& c : corpus.conversations())
      for (std::size_t p = 0; p < c.utterances.size(); ++p)
        if (c.utterances[p].speaker == SpeakerRole::Listener && !labels.count(c.utterances[p].utterance_id))
          missing.push_back(build_context(c, p, config.k));
    if (!missing.empty() && reg->complete_for(config.k)) {
      const auto sets = predict_labels_batch(*reg, missing, config.label_threshold);
      for (std::size_t i = 0; i < missing.size(); ++i) labels[missing[i].target.utterance_id] = sets[i].codes;
    }
    return labels;
  }

  void work() {
    while (true) {
      std::string id;
      {
        std::unique_lock lock(jobs_mu);
        jobs_cv.wait(lock, [&] { return stopping || !pending.empty(); });
        if (stopping && pending.empty()) return;
        id = pending.front();
        pending.pop_front();
        jobs[id].status = "running";
      }
      run_job(id);
      {
        std::lock_guard lock(jobs_mu);
        --active_jobs;
      }
      jobs_cv.notify_all();
    }
  }

  void run_job(const std::string& id) {
    Job spec;
    {
      std::lock_guard lock(jobs_mu);
      spec = jobs[id];
    }
    json models = json::array(), skipped = json::array();
    std::string error;
    std::size_t examples = 0;
    try {
      const auto view = store.snapshot();
      const auto labels = resolve_labels(view->human_records());
      TrainOptions opt;
      opt.context_sizes = {spec.k};
      if (spec.code) opt.codes = {*spec.code};
      opt.hyper = config.hyper;
      opt.seed = config.seed;
      opt.trained_at = now_utc();
      const auto [base, version] = current_registry();
      auto outcome = train_models(corpus, labels, opt, ModelRegistry{});
      examples = outcome.examples;
      {
        std::lock_guard lock(registry_mu);
        ModelRegistry next = *registry;
        for (const auto& [key, entry] : outcome.registry.entries()) {
          next.put(key.first, key.second, entry);
          models.push_back(model_json(key.first, key.second, entry));
        }
        if (!config.models_dir.empty()) next.save(config.models_dir);
        registry = std::make_shared<const ModelRegistry>(std::move(next));
        ++registry_version;
      }
      for (const auto& [code, k] : outcome.skipped) skipped.push_back({{"code", code_name(code)}, {"k", k}});
    } catch (const std::exception& e) {
      error = e.what();
    }
    std::lock_guard lock(jobs_mu);
    auto& job = jobs[id];
    job.status = error.empty() ? "done" : "failed";
    job.error = error;
    job.models = std::move(models);
    job.skipped = std::move(skipped);
    job.examples = examples;
  }

  static json job_json(const Job& j) {
    json out = {{"job_id", j.id}, {"status", j.status}, {"k", j.k}, {"annotator_id", j.annotator},
                {"code", j.code ? json(code_name(*j.code)) : json(nullptr)}};
    if (j.status == "done" || j.status == "failed") {
      out["models"] = j.models;
      out["skipped"] = j.skipped;
      out["examples"] = j.examples;
    }
    if (!j.error.empty()) out["error"] = j.error;
    return out;
  }

  std::string annotator_of(const ApiRequest& r, const json* body) const {
    if (body && body->contains("annotator_id")) {
      const auto& a = (*body)["annotator_id"];
      if (!a.is_string()) throw DataError("bad_request", "annotator_id must be a string");
      if (!a.get<std::string>().empty()) return a.get<std::string>();
    }
    if (auto it = r.headers.find("x-annotator-id"); it != r.headers.end()) return it->second;
    return {};
  }

  static json parse_body(const ApiRequest& r) {
    if (r.body.empty()) return json::object();
    try {
      auto j = json::parse(r.body);
      if (!j.is_object()) throw DataError("bad_request", "request body must be a JSON object");
      return j;
    } catch (const json::parse_error&) {
      throw DataError("bad_request", "request body is not valid JSON");
    }
  }

  // --- endpoints ---

  ApiResponse healthz() {
    const auto [reg, version] = current_registry();
    return reply(200, {{"status", "ok"},
                       {"conversations", corpus.size()},
                       {"utterances", corpus.utterance_count()},
                       {"label_records", store.log_size()},
                       {"models", reg->entries().size()},
                       {"registry_version", version}});
  }

  ApiResponse list_conversations(const ApiRequest& r) {
    const auto offset = query_size(r, "offset", 0, corpus.size());
    const auto limit = query_size(r, "limit", 50, 1000);
    json items = json::array();
    const auto& convs = corpus.conversations();
    for (std::size_t i = offset; i < convs.size() && items.size() < limit; ++i) {
      const auto& c = convs[i];
      items.push_back({{"conversation_id", c.conversation_id},
                       {"listener_id", c.listener_id},
                       {"member_id", c.member_id},
                       {"rating", c.rating ? json(*c.rating) : json(nullptr)},
                       {"utterance_count", c.utterances.size()},
                       {"start_time", format_iso8601(c.start_time())}});
    }
    return reply(200, {{"total", convs.size()}, {"offset", offset}, {"conversations", items}});
  }

  ApiResponse get_conversation(const std::string& id) {
    const Conversation* c = corpus.find_conversation(id);
    if (!c) return error_reply(404, "unknown_conversation", fmt::format("no conversation '{}'", id));
    const auto view = store.snapshot();
    std::map<std::string, json> labels;
    for (const auto& [key, rec] : view->current) {
      json codes = json::array();
      for (auto code : rec.codes.to_vector()) codes.push_back(code_name(code));
      labels[key.first].push_back({{"source", rec.source.to_string()}, {"codes", codes},
                                   {"decided_at", format_iso8601(rec.decided_at)}});
    }
    json utts = json::array();
    for (const auto& u : c->utterances) {
      json item = {{"utterance_id", u.utterance_id}, {"index", u.index}, {"speaker", speaker_name(u.speaker)},
                   {"timestamp", format_iso8601(u.timestamp)}, {"text", u.text},
                   {"verified", view->verified.count(u.utterance_id) > 0}};
      auto it = labels.find(u.utterance_id);
      item["labels"] = it == labels.end() ? json::array() : it->second;
      utts.push_back(std::move(item));
    }
    return reply(200, {{"conversation_id", c->conversation_id},
                       {"listener_id", c->listener_id},
                       {"member_id", c->member_id},
                       {"listener_age", c->listener_age ? json(*c->listener_age) : json(nullptr)},
                       {"member_age", c->member_age ? json(*c->member_age) : json(nullptr)},
                       {"rating", c->rating ? json(*c->rating) : json(nullptr)},
                       {"utterances", utts}});
  }

  ApiResponse queue(const ApiRequest& r) {
    const auto limit = query_size(r, "limit", 20, 500);
    std::string annotator;
    if (auto it = r.query.find("annotator"); it != r.query.end()) annotator = it->second;
    const auto [reg, version] = current_registry();
    if (!reg->complete_for(config.k))
      return error_reply(409, "models_missing",
                         fmt::format("no complete model set for k={}; POST /train first", config.k));
    const auto view = store.snapshot();
    SuggestionQueue q;
    {
      std::lock_guard lock(queue_mu);
      if (queue_cache.registry_version != version) {
        const auto contexts = unverified_listener_contexts(corpus, *view, config.k);
        queue_cache.queue = suggest(*reg, contexts, config.suggest_threshold, config.k);
        queue_cache.registry_version = version;
      }
      drop_verified(queue_cache.queue, *view);
      q = queue_cache.queue;
    }
    json items = json::array();
    for (const auto& item : q.items) {
      if (items.size() >= limit) break;
      const auto ref = corpus.locate(item.utterance_id);
      const auto& conv = corpus.conversations()[ref->conversation];
      json context = json::array();
      for (std::size_t p = ref->position >= config.k ? ref->position - config.k : 0; p < ref->position; ++p)
        context.push_back({{"utterance_id", conv.utterances[p].utterance_id},
                           {"speaker", speaker_name(conv.utterances[p].speaker)},
                           {"text", conv.utterances[p].text}});
      json suggestions = json::array();
      for (const auto& s : item.suggestions)
        suggestions.push_back({{"code", code_name(s.code)}, {"confidence", s.confidence}, {"model_id", s.model_id}});
      items.push_back({{"utterance_id", item.utterance_id},
                       {"conversation_id", item.conversation_id},
                       {"text", conv.utterances[ref->position].text},
                       {"context", context},
                       {"suggestions", suggestions},
                       {"max_confidence", item.max_confidence},
                       {"model_version", version}});
    }
    return reply(200, {{"threshold", q.threshold},
                       {"k", q.k},
                       {"annotator", annotator},
                       {"model_version", version},
                       {"total", q.items.size()},
                       {"items", items}});
  }

  ApiResponse post_labels(const ApiRequest& r) {
    const json body = parse_body(r);
    const std::string annotator = annotator_of(r, &body);
    if (annotator.empty()) return error_reply(400, "missing_annotator", "annotator_id is required");
    if (!body.contains("utterance_id") || !body["utterance_id"].is_string())
      return error_reply(400, "bad_request", "utterance_id must be a string");
    if (!body.contains("codes") || !body["codes"].is_array())
      return error_reply(400, "bad_request", "codes must be an array of code names");
    std::vector<std::string> codes;
    for (const auto& c : body["codes"]) {
      if (!c.is_string()) return error_reply(400, "bad_request", "codes must be an array of code names");
      codes.push_back(c.get<std::string>());
    }
    const auto outcome = record_decision(store, corpus, body["utterance_id"].get<std::string>(), annotator, codes);
    json out_codes = json::array();
    for (auto c : outcome.record.codes.to_vector()) out_codes.push_back(code_name(c));
    return reply(outcome.appended ? 201 : 200, {{"appended", outcome.appended},
                                                {"utterance_id", outcome.record.utterance_id},
                                                {"source", outcome.record.source.to_string()},
                                                {"codes", out_codes},
                                                {"decided_at", format_iso8601(outcome.record.decided_at)}});
  }

  ApiResponse post_train(const ApiRequest& r) {
    const json body = parse_body(r);
    const std::string annotator = annotator_of(r, &body);
    if (annotator.empty()) return error_reply(400, "missing_annotator", "annotator_id is required");
    Job job;
    job.annotator = annotator;
    job.k = config.k;
    if (body.contains("k")) {
      if (!body["k"].is_number_unsigned()) return error_reply(400, "bad_request", "k must be a non-negative integer");
      job.k = body["k"].get<std::size_t>();
    }
    if (body.contains("code") && !body["code"].is_null()) {
      if (!body["code"].is_string()) return error_reply(400, "bad_request", "code must be a string");
      job.code = parse_code(body["code"].get<std::string>());
      if (!job.code) return error_reply(422, "unknown_code", "unknown code");
    }
    json out;
    {
      std::lock_guard lock(jobs_mu);
      job.id = fmt::format("job-{}", next_job++);
      jobs[job.id] = job;
      pending.push_back(job.id);
      ++active_jobs;
      out = job_json(job);
    }
    jobs_cv.notify_all();
    return reply(202, out);
  }

  ApiResponse get_job(const std::string& id) {
    std::lock_guard lock(jobs_mu);
    auto it = jobs.find(id);
    if (it == jobs.end()) return error_reply(404, "unknown_job", fmt::format("no training job '{}'", id));
    return reply(200, job_json(it->second));
  }

  ApiResponse agreement() {
    const auto report = agreement_report(*store.snapshot());
    json codes = json::array();
    for (const auto& row : report.per_code)
      codes.push_back({{"code", code_name(row.code)},
                       {"display_name", display_name(row.code)},
                       {"category", category_name(category_of(row.code))},
                       {"accepted", report.accepted(row.code)},
                       {"alpha", alpha_json(row.alpha)}});
    return reply(200, {{"threshold", report.acceptance_threshold},
                       {"codes", codes},
                       {"cumulative", alpha_json(report.cumulative)},
                       {"table", agreement_table(report)}});
  }

  ApiResponse satisfaction(const ApiRequest& r) {
    const auto mode = r.query.count("temporal_past") && r.query.at("temporal_past") == "true"
                          ? PastRatingMode::Temporal
                          : PastRatingMode::LeaveCurrentOut;
    const auto design = build_design(corpus, analysis_labels(), mode);
    const auto weights = class_weights(design.rows);
    const auto fit = fit_weighted_logistic(design.rows, weights);
    json rows = json::array();
    for (std::size_t j = 0; j < fit.names.size(); ++j)
      rows.push_back({{"covariate", fit.names[j]},
                      {"coefficient", fit.coefficients[j]},
                      {"se", fit.standard_errors[j]},
                      {"z", fit.z_scores[j]},
                      {"p", fit.p_values[j]},
                      {"stars", significance_stars(fit.p_values[j])},
                      {"odds_ratio", fit.odds_ratios[j]}});
    return reply(200, {{"coefficients", rows},
                       {"dropped", fit.dropped},
                       {"aic", fit.aic},
                       {"log_likelihood", fit.log_likelihood},
                       {"converged", fit.converged},
                       {"weights", {{"satisfactory", weights.satisfactory}, {"unsatisfactory", weights.unsatisfactory}}},
                       {"cohort",
                        {{"conversations", design.conversations},
                         {"rated", design.rated},
                         {"used", design.rows.size()},
                         {"excluded_unrated", design.excluded_unrated},
                         {"excluded_missing_age", design.excluded_missing_age}}},
                       {"legend", kStarLegend},
                       {"table", satisfaction_table(fit, &design)}});
  }

  ApiResponse trends(const ApiRequest& r) {
    const double span = static_cast<double>(query_size(r, "min_span_days", 365, 100000));
    const auto sessions = query_size(r, "min_sessions", 500, 1u << 30);
    const auto min_len = query_size(r, "min_utterances", 50, 1u << 30);
    const auto labels = analysis_labels();
    const auto joins = listener_join_times(corpus);
    const Corpus active = active_listener_cohort(corpus, span, sessions, min_len);
    const auto series = code_fraction_by_bucket(active, labels, &joins);
    json rows = json::array();
    for (auto c : kAllCodes)
      for (auto b : kAllBuckets) {
        const auto& cell = series.at(c, b);
        rows.push_back({{"code", code_name(c)},
                        {"bucket", bucket_name(b)},
                        {"utterances", cell.utterance_count},
                        {"count", cell.code_count},
                        {"fraction", cell.fraction ? json(*cell.fraction) : json(nullptr)},
                        {"ci_low", cell.fraction ? json(cell.ci_low) : json(nullptr)},
                        {"ci_high", cell.fraction ? json(cell.ci_high) : json(nullptr)}});
      }
    return reply(200, {{"listeners", series.listeners}, {"conversations", active.size()}, {"rows", rows}});
  }

  ApiResponse topwords(const ApiRequest& r) {
    const auto n = query_size(r, "n", 5, 100);
    const auto report = top_words(corpus, analysis_labels(), n);
    json codes = json::array();
    for (auto c : kAllCodes) {
      json words = json::array();
      for (const auto& w : report.per_code[index_of(c)])
        words.push_back({{"word", w.word}, {"stem", w.stem}, {"score", w.score}});
      codes.push_back({{"code", code_name(c)}, {"words", words}});
    }
    return reply(200, {{"n", n}, {"codes", codes}});
  }

  ApiResponse route(const ApiRequest& r) {
    static const std::regex conv_re("^/conversations/([^/]+)$");
    static const std::regex job_re("^/train/([^/]+)$");
    std::smatch m;
    if (r.method == "GET") {
      if (r.path == "/healthz") return healthz();
      if (r.path == "/conversations") return list_conversations(r);
      if (std::regex_match(r.path, m, conv_re)) return get_conversation(m[1]);
      if (r.path == "/queue") return queue(r);
      if (std::regex_match(r.path, m, job_re)) return get_job(m[1]);
      if (r.path == "/agreement") return agreement();
      if (r.path == "/analysis/satisfaction") return satisfaction(r);
      if (r.path == "/analysis/trends") return trends(r);
      if (r.path == "/analysis/topwords") return topwords(r);
    } else if (r.method == "POST") {
      if (r.path == "/labels") return post_labels(r);
      if (r.path == "/train") return post_train(r);
    }
    return error_reply(404, "not_found", fmt::format("no route for {} {}", r.method, r.path));
  }
};

Service::Service(const ServiceConfig& config) : impl_(std::make_unique<Impl>(config)) {}
Service::~Service() = default;

const ServiceConfig& Service::config() const noexcept { return impl_->config; }

ApiResponse Service::handle(const ApiRequest& request) {
  try {
    return impl_->route(request);
  } catch (const DataError& e) {
    return error_reply(status_for(e), e.code(), e.what());
  } catch (const UsageError& e) {
    return error_reply(400, e.code(), e.what());
  } catch (const ModelError& e) {
    return error_reply(409, e.code(), e.what());
  } catch (const RetriableError& e) {
    return error_reply(503, e.code(), e.what());
  } catch (const Error& e) {
    return error_reply(502, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal", e.what());
  }
}

void Service::wait_for_jobs() {
  std::unique_lock lock(impl_->jobs_mu);
  impl_->jobs_cv.wait(lock, [&] { return impl_->active_jobs == 0; });
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Service& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      for (const auto& [k, v] : req.headers) {
        std::string name = k;
        for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        r.headers.emplace(std::move(name), v);
      }
      r.body = req.body;
      const auto out = service.handle(r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Annotator-Id");
      res.status = 204;
    });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("bind_failed", fmt::format("cannot bind {}:{}", host, port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) throw Error("bind_failed", fmt::format("cannot bind {}:{}", host, port));
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace micode
