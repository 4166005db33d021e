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

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "micode/error.hpp"
#include "micode/registry.hpp"

using namespace micode;
using nlohmann::json;

namespace {

// Scores every item with a fixed value, optionally reversing the reply order.
class StubModel {
 public:
  StubModel() {
    server_.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      json items = json::array();
      for (const auto& it : body.at("items")) {
        json scores = json::object();
        for (auto c : kAllCodes) scores[std::string(code_name(c))] = score.load();
        items.push_back({{"utterance_id", it.at("utterance_id")}, {"scores", scores}});
      }
      if (reverse) std::reverse(items.begin(), items.end());
      res.set_content(json{{"items", items}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubModel() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<double> score{0.5};
  std::atomic<bool> reverse{false};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

ModelRegistry external_registry(const std::string& url) {
  ModelRegistry reg;
  for (auto c : kAllCodes) reg.put(c, 1, {ExternalModelRef{url, "stub", 2.0}, {"stub", {1}, 0, std::nullopt}});
  return reg;
}

std::vector<ContextualUtterance> batch(std::size_t n) {
  std::vector<ContextualUtterance> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].target.utterance_id = "u" + std::to_string(i);
    out[i].k = 1;
    out[i].context_text = "text " + std::to_string(i);
  }
  return out;
}

}  // namespace

TEST_CASE("registry completeness and lookup") {
  ModelRegistry reg;
  CHECK_FALSE(reg.complete_for(1));
  for (auto c : kAllCodes)
    if (c != MiCode::Other) reg.put(c, 1, {ExternalModelRef{"http://x", "m"}, {}});
  CHECK_FALSE(reg.complete_for(1));
  reg.put(MiCode::Other, 1, {ExternalModelRef{"http://x", "m"}, {}});
  CHECK(reg.complete_for(1));
  CHECK_FALSE(reg.complete_for(0));
  CHECK(reg.context_sizes() == std::vector<std::size_t>{1});
  CHECK(reg.find(MiCode::Reflection, 0) == nullptr);
  CHECK_THROWS_AS(score_batch(ModelRegistry{}, batch(1)), ModelError);
}

TEST_CASE("external model protocol") {
  StubModel stub;
  auto reg = external_registry(stub.url());

  SUBCASE("threshold is inclusive") {
    stub.score = 0.7;
    auto labels = predict_labels(reg, batch(1)[0], 0.7);
    CHECK(labels.codes.size() == kNumCodes);
    stub.score = 0.69;
    CHECK(predict_labels(reg, batch(1)[0], 0.7).codes.empty());
  }
  SUBCASE("100 items keep request order") {
    stub.score = 0.25;
    auto out = predict_labels_batch(reg, batch(100), 0.5);
    REQUIRE(out.size() == 100);
    for (const auto& l : out) CHECK(l.confidence[index_of(MiCode::Reflection)] == 0.25);
  }
  SUBCASE("reordered reply is a protocol error") {
    stub.reverse = true;
    CHECK_THROWS_AS(score_batch(reg, batch(3)), ProtocolError);
  }
  SUBCASE("probability outside [0,1] is a protocol error") {
    stub.score = 1.2;
    CHECK_THROWS_AS(score_batch(reg, batch(2)), ProtocolError);
  }
}

TEST_CASE("unreachable external model is retriable") {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto reg = external_registry("http://127.0.0.1:" + std::to_string(port));
  CHECK_THROWS_AS(score_batch(reg, batch(1)), RetriableError);
}

TEST_CASE("registry persists external refs") {
  testing::TempDir dir("reg");
  auto reg = external_registry("http://127.0.0.1:9");
  reg.save(dir.path());
  auto back = ModelRegistry::load(dir.path());
  CHECK(back.complete_for(1));
  const auto& ref = std::get<ExternalModelRef>(back.find(MiCode::Affirm, 1)->model);
  CHECK(ref.base_url == "http://127.0.0.1:9");
  CHECK_THROWS_AS(ModelRegistry::load(dir / "nothing"), ModelError);
}
