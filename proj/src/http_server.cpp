// Copyright 2026 The lexsys Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <httplib.h>

#include <cctype>

#include "lexsys/error.hpp"
#include "lexsys/service.hpp"

namespace lexsys {

struct Server::Impl {
  httplib::Server http;
  int port = -1;
};

namespace {

HttpRequest adapt(const httplib::Request& req) {
  HttpRequest out;
  out.method = req.method;
  out.path = req.path;
  for (const auto& [k, v] : req.params) out.params.emplace(k, v);
  for (const auto& [k, v] : req.headers) {
    std::string key = k;
    for (auto& c : key) c = char(std::tolower(static_cast<unsigned char>(c)));
    out.headers.emplace(std::move(key), v);
  }
  out.body = req.body;
  return out;
}

}  // namespace

Server::Server(Workspace& ws, ServiceConfig config)
    : impl_(std::make_unique<Impl>()), router_(ws), config_(std::move(config)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = router_.handle(adapt(req));
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(out.body.dump(2) + "\n", "application/json");
  };
  auto& http = impl_->http;
  http.Get(".*", handler);
  http.Post(".*", handler);
  http.Put(".*", handler);
  http.Delete(".*", handler);
  http.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session-Token");
  });
  const std::size_t threads = config_.threads;
  http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& http = impl_->http;
  if (config_.port == 0) {
    impl_->port = http.bind_to_any_port(config_.host);
  } else {
    impl_->port = http.bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::BindError,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return impl_->port;
}

void Server::listen() {
  if (impl_->port < 0) throw Error(ErrorCode::BindError, "listen before bind");
  impl_->http.listen_after_bind();
}

int Server::start_background() {
  const int port = bind();
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return port;
}

void Server::stop() {
  if (impl_) impl_->http.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace lexsys
