// Copyright 2026 The SoundSearch Authors
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

#include "soundsearch/service/http_server.h"

#include <fstream>

#include <httplib.h>

#include "soundsearch/error.h"

namespace soundsearch::service {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";
constexpr std::size_t kMediaChunk = 64 * 1024;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, error_body(code, message));
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ApiError& e) {
    send_error(res, e.status(), e.code(), e.what());
  } catch (const Error& e) {
    const ApiError api = to_api_error(e);
    send_error(res, api.status(), api.code(), api.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

// Code for statuses produced by the transport itself rather than a handler.
std::pair<std::string, std::string> transport_error(int status) {
  switch (status) {
    case 404: return {"NotFound", "no such endpoint"};
    case 405: return {"MethodNotAllowed", "method not allowed"};
    case 413: return {"PayloadTooLarge", "request body exceeds the upload cap"};
    case 416: return {"RangeNotSatisfiable", "requested range is not satisfiable"};
    default:
      return {"HttpError", httplib::status_message(status)};
  }
}

}  // namespace

struct HttpServer::Impl {
  std::shared_ptr<SearchService> service;
  httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<SearchService> service) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  SearchService& svc = *impl_->service;
  httplib::Server& s = impl_->server;
  const ServerConfig& sc = svc.config().server;

  const std::size_t threads = sc.threads;
  s.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  s.set_payload_max_length(sc.upload_cap_bytes);
  s.set_default_headers({
      {"Access-Control-Allow-Origin", sc.cors_origin},
      {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
      {"Access-Control-Allow-Headers", "Content-Type, Range"},
      {"Access-Control-Expose-Headers", "Content-Range, Accept-Ranges, Content-Length"},
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    auto [code, message] = transport_error(res.status);
    res.set_content(error_body(code, message).dump(), kJson);
    return httplib::Server::HandlerResponse::Handled;
  });

  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  s.Post("/api/search", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        throw ApiError(400, "InvalidRequest", std::string("body is not valid JSON: ") + e.what());
      }
      send_json(res, 200, svc.search(body));
    });
  });

  s.Post("/api/upload", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::vector<unsigned char> bytes(req.body.begin(), req.body.end());
      send_json(res, 200, svc.upload(std::move(bytes), req.get_header_value("Content-Type")));
    });
  });

  s.Get(R"(/api/similar/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, 200,
                svc.similar(req.matches[1], param(req, "k"), param(req, "cursor"),
                            param(req, "dataset"), param(req, "dedup")));
    });
  });

  s.Get("/api/datasets", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.datasets()); });
  });

  // The transport applies Range headers to the provider, so partial and
  // multi-range requests stream straight from the file.
  s.Get(R"(/api/clip/([^/]+)/audio)", [&svc](const httplib::Request& req,
                                             httplib::Response& res) {
    guarded(res, [&] {
      const MediaSource src = svc.locate_media(req.matches[1], param(req, "dataset"));
      auto file = std::make_shared<std::ifstream>(src.path, std::ios::binary);
      res.set_header("Accept-Ranges", "bytes");
      res.set_content_provider(
          src.size, src.content_type,
          [file](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
            char buf[kMediaChunk];
            file->seekg(static_cast<std::streamoff>(offset));
            const std::size_t n = std::min(length, sizeof(buf));
            file->read(buf, static_cast<std::streamsize>(n));
            const auto got = static_cast<std::size_t>(file->gcount());
            if (got == 0) return false;
            return sink.write(buf, got);
          });
    });
  });

  if (!sc.static_dir.empty()) s.set_mount_point("/", sc.static_dir.string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace soundsearch::service
