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

#include <nlohmann/json.hpp>

#include "cli_runner.hpp"
#include "helpers.hpp"

using testing::cli;
using testing::run;

TEST_CASE("usage errors exit 2, data errors exit 1 with a JSON error line") {
  testing::TempDir dir("cli");
  CHECK(run(cli()).status == 2);
  CHECK(run(cli() + " frobnicate").status == 2);
  CHECK(run("env -u MICODE_DATA_DIR " + cli() + " satisfy").status == 2);
  CHECK(run(cli() + " train --k 3 --input x --labels y --models z").status == 2);
  const auto err = (dir / "err.txt").string();
  auto r = run(cli() + " satisfy --input " + (dir / "missing.jsonl").string() + " --labels x --out " +
                   dir.path().string(),
               err);
  CHECK(r.status == 1);
  auto line = testing::slurp(err);
  auto j = nlohmann::json::parse(line.substr(0, line.find('\n')));
  CHECK(j.contains("error"));
  CHECK(j["code"] == "unreadable_file");
}

TEST_CASE("agree on the bundled fixture") {
  testing::TempDir dir("agree");
  auto r = run(cli() + " agree --labels " MICODE_FIXTURES "/sample.labels --out " + dir.path().string());
  REQUIRE(r.status == 0);
  CHECK(r.out.find("Reflection") != std::string::npos);
  CHECK(r.out.find("0.533") != std::string::npos);
  const auto tsv = testing::slurp(dir / "agreement.tsv");
  CHECK(tsv.find("Reflection\t") != std::string::npos);
}

TEST_CASE("small pipeline runs and satisfy prints the legend") {
  testing::TempDir dir("pipe");
  const std::string d = dir.path().string();
  const std::string env = "SOURCE_DATE_EPOCH=1700000000 MICODE_DATA_DIR=" + d + " ";
  REQUIRE(run(env + cli() + " simgen --seed 3 --conversations 120 --out " + d).status == 0);
  CHECK(std::filesystem::exists(dir / "planted.json"));
  REQUIRE(run(env + cli() + " train --epochs 3").status == 0);
  CHECK(std::filesystem::exists(dir / "models" / "registry.json"));
  REQUIRE(run(env + cli() + " label").status == 0);
  auto sat = run(env + cli() + " satisfy --labels " + (dir / "model_labels.jsonl").string());
  REQUIRE(sat.status == 0);
  CHECK(sat.out.find("***p < 0.001; **p<0.01; *p<0.05 ⊙p<0.1") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "reports" / "satisfaction.tsv"));
  auto tw = run(env + cli() + " topwords --n 3");
  CHECK(tw.status == 0);
  auto empty = run(env + cli() + " trends");
  CHECK(empty.status == 1);
  auto tr = run(env + cli() + " trends --min-span-days 0 --min-sessions 1 --min-utterances 1");
  CHECK(tr.status == 0);
  CHECK(std::filesystem::exists(dir / "reports" / "trends.svg"));
  auto corr = run(env + cli() + " corr --min-span-days 0 --min-sessions 1 --min-utterances 1");
  CHECK(corr.status == 0);
  CHECK(std::filesystem::exists(dir / "reports" / "corr_listener.tsv"));
  auto q = run(env + cli() + " suggest");
  CHECK(q.status == 0);
  auto v = run(env + cli() + " validate --sample 50");
  CHECK(v.status == 0);
  auto ev = run(env + cli() + " evaluate");
  CHECK(ev.status == 0);
  auto in = run(env + cli() + " ingest --input " + (dir / "corpus.jsonl").string() + " --out " +
                (dir / "again.jsonl").string());
  CHECK(in.status == 0);
  CHECK(testing::slurp(dir / "again.jsonl") == testing::slurp(dir / "corpus.jsonl"));
}
