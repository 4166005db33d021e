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

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "micode/classifier.hpp"

namespace micode {

struct ServiceConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path label_log_path;
  std::filesystem::path models_dir;  // may be empty: registry kept in memory only
  std::size_t k = 1;
  double suggest_threshold = 0.7;
  double label_threshold = 0.5;
  std::uint64_t seed = 1;
  Hyper hyper;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // names lowercased
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// Transport-independent request handling. Thread-safe.
class Service {
 public:
  explicit Service(const ServiceConfig& config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ApiResponse handle(const ApiRequest& request);

  // Blocks until every queued training job has finished.
  void wait_for_jobs();
  const ServiceConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP front end over a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds and serves on a background thread; returns the bound port.
  // Throws Error("bind_failed") when the address is unavailable.
  int start(const std::string& host, int port);
  void stop();
  // Serves on the calling thread until stop() is called elsewhere.
  void run(const std::string& host, int port);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace micode
