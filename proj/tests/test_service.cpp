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

#include <doctest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "micode/service.hpp"
#include "micode/simgen.hpp"

using namespace micode;
using nlohmann::json;

namespace {

struct Fixture {
  testing::TempDir dir{"svc"};
  std::unique_ptr<Service> service;

  Fixture() {
    auto spec = preset("default", 17);
    spec.n_conversations = 300;
    auto g = generate_corpus(spec);
    write_corpus(dir / "corpus.jsonl", g.corpus);
    std::vector<LabelRecord> seeded;
    for (const auto& r : g.labels)
      if (r.utterance_id < "c0200") seeded.push_back(r);
    write_label_file(dir / "labels.log", seeded);
    ServiceConfig cfg;
    cfg.corpus_path = dir / "corpus.jsonl";
    cfg.label_log_path = dir / "labels.log";
    cfg.models_dir = dir / "models";
    cfg.hyper.epochs = 5;
    service = std::make_unique<Service>(cfg);
  }

  std::pair<int, json> call(const std::string& method, const std::string& path,
                            std::map<std::string, std::string> query = {}, const json& body = nullptr,
                            std::map<std::string, std::string> headers = {}) {
    ApiRequest r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    r.headers = std::move(headers);
    if (!body.is_null()) r.body = body.dump();
    auto out = service->handle(r);
    return {out.status, json::parse(out.body)};
  }
};

}  // namespace

TEST_CASE("service API contract") {
  Fixture f;

  auto [hs, health] = f.call("GET", "/healthz");
  CHECK(hs == 200);
  CHECK(health["conversations"] == 300);

  auto [ls, list] = f.call("GET", "/conversations", {{"offset", "10"}, {"limit", "5"}});
  CHECK(ls == 200);
  CHECK(list["total"] == 300);
  REQUIRE(list["conversations"].size() == 5);
  CHECK(list["conversations"][0]["conversation_id"] == "c0010");

  auto [cs, conv] = f.call("GET", "/conversations/c0001");
  CHECK(cs == 200);
  CHECK(conv["utterances"][1]["verified"] == true);
  CHECK(f.call("GET", "/conversations/zzz").first == 404);

  auto [qs, q0] = f.call("GET", "/queue");
  CHECK(qs == 409);
  CHECK(q0["code"] == "models_missing");

  auto [ts, too_many] = f.call("POST", "/labels", {},
                               {{"utterance_id", "c0060-u0001"},
                                {"annotator_id", "ann"},
                                {"codes", {"Reflection", "Affirm", "Support", "Direct"}}});
  CHECK(ts == 422);
  CHECK(too_many == json{{"error", "max 3 codes"}, {"code", "too_many_codes"}});
  CHECK(f.call("POST", "/labels", {}, {{"utterance_id", "c0060-u0001"}, {"codes", {"Reflection"}}}).first == 400);
  CHECK(f.call("POST", "/labels", {}, {{"utterance_id", "nope"}, {"annotator_id", "a"}, {"codes", {"Reflection"}}})
            .first == 404);
  CHECK(f.call("POST", "/labels", {}, {{"utterance_id", "c0060-u0001"}, {"annotator_id", "a"}, {"codes", {"Zap"}}})
            .first == 422);
  CHECK(f.call("GET", "/nowhere").first == 404);

  auto [js, job] = f.call("POST", "/train", {}, {{"k", 1}}, {{"x-annotator-id", "ann"}});
  REQUIRE(js == 202);
  f.service->wait_for_jobs();
  auto [gs, done] = f.call("GET", "/train/" + job["job_id"].get<std::string>());
  CHECK(gs == 200);
  CHECK(done["status"] == "done");
  CHECK(done["models"].size() == kNumCodes);
  CHECK(f.call("GET", "/train/job-999").first == 404);

  auto [q1s, q1] = f.call("GET", "/queue", {{"limit", "20"}, {"annotator", "ann"}});
  REQUIRE(q1s == 200);
  REQUIRE(q1["items"].size() > 0);
  CHECK(q1["items"].size() <= 20);
  for (const auto& item : q1["items"]) {
    CHECK(item["utterance_id"].get<std::string>() >= "c0200");
    for (const auto& s : item["suggestions"]) CHECK(s["confidence"].get<double>() >= 0.7);
    CHECK(item.contains("context"));
    CHECK(item.contains("model_version"));
  }

  const auto first = q1["items"][0];
  json codes = json::array();
  for (const auto& s : first["suggestions"]) {
    if (codes.size() == 3) break;
    codes.push_back(s["code"]);
  }
  json body = {{"utterance_id", first["utterance_id"]}, {"annotator_id", "ann"}, {"codes", codes}};
  CHECK(f.call("POST", "/labels", {}, body).first == 201);
  CHECK(f.call("POST", "/labels", {}, body).first == 200);
  auto [q2s, q2] = f.call("GET", "/queue", {{"limit", "1000"}});
  CHECK(q2s == 200);
  for (const auto& item : q2["items"]) CHECK(item["utterance_id"] != first["utterance_id"]);

  auto [as, agreement] = f.call("GET", "/agreement");
  CHECK(as == 200);
  CHECK(agreement["codes"].size() == kNumCodes);

  auto [ss, sat] = f.call("GET", "/analysis/satisfaction");
  CHECK(ss == 200);
  CHECK(sat["legend"] == "***p < 0.001; **p<0.01; *p<0.05 ⊙p<0.1");
  CHECK(sat["coefficients"].size() > 10);

  auto [trs, trends] =
      f.call("GET", "/analysis/trends", {{"min_span_days", "0"}, {"min_sessions", "1"}, {"min_utterances", "1"}});
  CHECK(trs == 200);
  CHECK(trends["rows"].size() == kNumCodes * 4);

  auto [ws, words] = f.call("GET", "/analysis/topwords", {{"n", "3"}});
  CHECK(ws == 200);
  CHECK(words["codes"].size() == kNumCodes);

  CHECK(std::filesystem::exists(f.dir / "models" / "registry.json"));
}

TEST_CASE("HTTP transport round trip") {
  Fixture f;
  HttpServer server(*f.service);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);
  auto h = client.Get("/healthz");
  REQUIRE(h);
  CHECK(h->status == 200);
  CHECK(h->get_header_value("Access-Control-Allow-Origin") == "*");
  auto p = client.Post("/labels", {{"X-Annotator-Id", "web"}},
                       json{{"utterance_id", "c0070-u0001"}, {"codes", {"Support"}}}.dump(), "application/json");
  REQUIRE(p);
  CHECK(p->status == 201);
  CHECK(json::parse(p->body)["source"] == "human:web");
  auto q = client.Get("/conversations?limit=2");
  REQUIRE(q);
  CHECK(json::parse(q->body)["conversations"].size() == 2);
  server.stop();
}
